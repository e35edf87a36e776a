// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

#include "bloch_nitsche/material.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bloch_nitsche {

namespace {

double row_norm(double eps, double g, WeightForm form)
{
    g = std::abs(g);
    return form == WeightForm::FirstOrder ? 1.0 / eps + g / (eps * eps) : 1.0 / (eps - g);
}

double max_faraday(const MaterialParams& p, MaterialLayout layout)
{
    return layout == MaterialLayout::Bulk ? std::abs(p.gamma) : std::abs(p.delta * p.kappaInf);
}

WeightForm effective_form(const MaterialParams& p, MaterialLayout layout)
{
    return layout == MaterialLayout::Bulk ? p.form : WeightForm::FirstOrder;
}

}  // namespace

MaterialParams MaterialParams::contrast(double J, double gamma)
{
    MaterialParams p;
    p.epsA = p.epsB = 1.0 + J;
    p.eps0 = 1.0;
    p.gamma = gamma;
    return p;
}

void MaterialParams::validate(MaterialLayout layout) const
{
    const double g = max_faraday(*this, layout);
    for (auto [name, eps] : {std::pair{"epsA", epsA}, std::pair{"epsB", epsB}, std::pair{"eps0", eps0}}) {
        if (!(eps > 0.0) || !std::isfinite(eps)) {
            std::ostringstream os;
            os << "permittivity " << name << " = " << eps << " must be positive";
            throw MaterialError(os.str());
        }
        if (!(eps * eps - g * g > 0.0)) {
            std::ostringstream os;
            os << "weight is not elliptic: " << name << " = " << eps << " requires |Faraday term| < " << eps
               << ", got " << g;
            throw MaterialError(os.str());
        }
    }
    if (!(radius > 0.0)) throw MaterialError("inclusion radius must be positive");
    if (!(kappaInf > 0.0)) throw MaterialError("kappaInf must be positive");
}

Mat2c sigma2()
{
    Mat2c s;
    s << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
    return s;
}

Mat2c weight_matrix(double eps, double g, WeightForm form)
{
    Mat2c W;
    if (form == WeightForm::FirstOrder) {
        const double a = 1.0 / eps, b = g / (eps * eps);
        W << cplx(a, 0), cplx(0, -b), cplx(0, b), cplx(a, 0);
    } else {
        const double det = eps * eps - g * g;
        W << cplx(eps / det, 0), cplx(0, -g / det), cplx(0, g / det), cplx(eps / det, 0);
    }
    return W;
}

double domain_wall(double zeta, WallKind kind, double kappaInf)
{
    if (kind == WallKind::Tanh) return kappaInf * std::tanh(zeta);
    if (zeta > 0.0) return kappaInf;
    if (zeta < 0.0) return -kappaInf;
    return 0.0;
}

double epsilon_at(const Vec2& x, const MaterialParams& p, const HexLattice& lattice,
                  std::span<const Inclusion> cellInclusions)
{
    const Vec2 y = wrap_to_cell(x, lattice).x;
    for (const Inclusion& inc : cellInclusions)
        if ((y - inc.center).norm() <= inc.radius) return inc.site == Site::A ? p.epsA : p.epsB;
    return p.eps0;
}

namespace {

Side side_at(const Vec2& x, const HexLattice& lattice, std::span<const Inclusion> cellInclusions)
{
    const Vec2 y = wrap_to_cell(x, lattice).x;
    for (const Inclusion& inc : cellInclusions)
        if ((y - inc.center).norm() <= inc.radius) return Side::Inner;
    return Side::Outer;
}

}  // namespace

WeightSample weight_bulk(const Vec2& x, const MaterialParams& p, const HexLattice& lattice,
                         std::span<const Inclusion> cellInclusions)
{
    const double eps = epsilon_at(x, p, lattice, cellInclusions);
    return {weight_matrix(eps, p.gamma, p.form), side_at(x, lattice, cellInclusions)};
}

WeightSample weight_edge(const Vec2& x, const MaterialParams& p, const HexLattice& lattice,
                         std::span<const Inclusion> cellInclusions)
{
    const double eps = epsilon_at(x, p, lattice, cellInclusions);
    const double g = p.delta * domain_wall(p.delta * lattice.k2.dot(x), p.wall, p.kappaInf);
    return {weight_matrix(eps, g, WeightForm::FirstOrder), side_at(x, lattice, cellInclusions)};
}

std::pair<double, double> side_norms(const MaterialParams& p, MaterialLayout layout)
{
    const double g = max_faraday(p, layout);
    const WeightForm form = effective_form(p, layout);
    const double n1 = std::max(row_norm(p.epsA, g, form), row_norm(p.epsB, g, form));
    return {n1, row_norm(p.eps0, g, form)};
}

Material::Material(const MaterialParams& params, MaterialLayout layout, const HexLattice& lattice)
    : params_(params), layout_(layout), lattice_(lattice)
{
    params_.validate(layout_);
    norms_ = side_norms(params_, layout_);
}

double Material::epsilon(Side side, Site site) const
{
    if (side == Side::Outer) return params_.eps0;
    return site == Site::A ? params_.epsA : params_.epsB;
}

double Material::faraday(const Vec2& x) const
{
    if (layout_ == MaterialLayout::Bulk) return params_.gamma;
    return params_.delta * domain_wall(params_.delta * lattice_.k2.dot(x), params_.wall, params_.kappaInf);
}

Mat2c Material::weight(const Vec2& x, Side side, Site site) const
{
    return weight_matrix(epsilon(side, site), faraday(x), effective_form(params_, layout_));
}

Material Material::asymptote(int sign) const
{
    MaterialParams p = params_;
    p.gamma = (sign >= 0 ? 1.0 : -1.0) * params_.delta * params_.kappaInf;
    p.form = WeightForm::FirstOrder;
    p.delta = 0.0;
    return Material(p, MaterialLayout::Bulk, lattice_);
}

}  // namespace bloch_nitsche
