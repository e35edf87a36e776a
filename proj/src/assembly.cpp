// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

#include "bloch_nitsche/assembly.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace bloch_nitsche {

namespace {

constexpr int kQuadOrder = 2;

using Grad = Eigen::Vector2cd;

struct Forms {
    std::vector<Eigen::Triplet<cplx>> a, b;
};

// Element loop shared by the Nitsche system and the energy-norm matrix. With
// `material == nullptr` the weight is the identity, the consistency terms are
// dropped and the jump penalty is h^-1.
Forms integrate(const Discretization& disc, const Material* material, const Vec2& k, double lambdaHat)
{
    const TriMesh& mesh = disc.mesh;
    const double h = mesh.h;
    const std::pair<double, double> norms = material ? material->norms() : std::pair{1.0, 1.0};
    const cplx ik(0.0, 1.0);

    Forms out;
    out.a.reserve(mesh.num_elements() * 12);
    if (material) out.b.reserve(mesh.num_elements() * 12);

    const auto weight = [&](const Vec2& x, Side s, Site site) -> Mat2c {
        return material ? material->weight(x, s, site) : Mat2c::Identity();
    };

    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const Triangle tri = mesh.triangle(e);
        const std::array<Vec2, 3> grads = tri.basis_gradients();
        const Classification& cls = disc.cut.kinds[e];
        const Site site = cls.inclusion >= 0 ? disc.inclusions[cls.inclusion].site : Site::A;

        std::array<int, 6> dof{};
        for (int j = 0; j < 3; ++j) {
            const int v = mesh.triangles[e][j];
            dof[j] = disc.dofs.side1[v];
            dof[3 + j] = disc.dofs.side2[v];
        }

        Eigen::Matrix<cplx, 6, 6> Ae = Eigen::Matrix<cplx, 6, 6>::Zero();
        Eigen::Matrix<double, 6, 6> Be = Eigen::Matrix<double, 6, 6>::Zero();

        const auto volume = [&](const std::vector<QuadPoint>& pts, Side s) {
            const int off = s == Side::Inner ? 0 : 3;
            for (const QuadPoint& qp : pts) {
                const Eigen::Vector3d lam = tri.barycentric(qp.x);
                const Mat2c W = weight(qp.x, s, site);
                std::array<Grad, 3> g;
                for (int j = 0; j < 3; ++j) g[j] = grads[j].cast<cplx>() + ik * lam[j] * k.cast<cplx>();
                for (int l = 0; l < 3; ++l) {
                    const Grad Wg = W * g[l];
                    for (int j = 0; j < 3; ++j) {
                        Ae(off + j, off + l) += qp.w * g[j].dot(Wg);
                        Be(off + j, off + l) += qp.w * lam[j] * lam[l];
                    }
                }
            }
        };

        if (cls.kind == ElementKind::Interface) {
            const CutGeometry& geom = *disc.cut.cuts[e];
            const CutQuadrature q = subcell_quadrature(geom, kQuadOrder);
            volume(q.side1, Side::Inner);
            volume(q.side2, Side::Outer);

            double kappa1 = 0.0, kappa2 = 0.0, penalty = 1.0 / h;
            if (material) {
                std::tie(kappa1, kappa2) = kappa_weights(geom.area1, geom.area2, norms.first, norms.second);
                penalty = lambdaHat *
                          lambda_K(h, geom.area1, geom.area2, geom.gammaLength, norms.first, norms.second) / h;
            }
            for (const LineQuadPoint& qp : q.gamma) {
                const Eigen::Vector3d lam = tri.barycentric(qp.x);
                // Local index c = 3 (side - 1) + j: jump sign +1 on side 1, -1 on side 2.
                std::array<double, 6> jump{};
                std::array<cplx, 6> flux{};
                for (int j = 0; j < 3; ++j) {
                    jump[j] = lam[j];
                    jump[3 + j] = -lam[j];
                }
                if (material) {
                    const Mat2c W1 = weight(qp.x, Side::Inner, site);
                    const Mat2c W2 = weight(qp.x, Side::Outer, site);
                    const Eigen::Vector2cd n = qp.normal.cast<cplx>();
                    for (int j = 0; j < 3; ++j) {
                        const Grad g = grads[j].cast<cplx>() + ik * lam[j] * k.cast<cplx>();
                        flux[j] = kappa1 * n.transpose() * (W1 * g);
                        flux[3 + j] = kappa2 * n.transpose() * (W2 * g);
                    }
                }
                for (int c = 0; c < 6; ++c)
                    for (int d = 0; d < 6; ++d)
                        Ae(c, d) += qp.w * (-flux[d] * jump[c] - std::conj(flux[c]) * jump[d] +
                                            penalty * jump[d] * jump[c]);
            }
        } else {
            const Side s = cls.kind == ElementKind::Inner ? Side::Inner : Side::Outer;
            volume(triangle_quadrature(tri, kQuadOrder), s);
        }

        for (int c = 0; c < 6; ++c) {
            if (dof[c] < 0) continue;
            for (int d = 0; d < 6; ++d) {
                if (dof[d] < 0) continue;
                if (Ae(c, d) != cplx(0.0)) out.a.emplace_back(dof[c], dof[d], Ae(c, d));
                if (material && Be(c, d) != 0.0) out.b.emplace_back(dof[c], dof[d], cplx(Be(c, d), 0.0));
            }
        }
    }
    return out;
}

SpMat to_sparse(int n, const std::vector<Eigen::Triplet<cplx>>& t)
{
    SpMat M(n, n);
    M.setFromTriplets(t.begin(), t.end());
    M.makeCompressed();
    return M;
}

NitscheSystem assemble(std::shared_ptr<const Discretization> disc, const Material& material,
                       const BlochParams& bloch, double lambdaHat)
{
    if (!(lambdaHat > 0.0)) throw Error("stabilization parameter must be positive");
    Forms f = integrate(*disc, &material, bloch.k, lambdaHat);
    NitscheSystem sys;
    sys.A = to_sparse(disc->size(), f.a);
    sys.B = to_sparse(disc->size(), f.b);
    for (int c = 0; c < sys.A.outerSize(); ++c)
        for (SpMat::InnerIterator it(sys.A, c); it; ++it)
            if (!std::isfinite(it.value().real()) || !std::isfinite(it.value().imag()))
                throw Error("non-finite entry in the assembled stiffness matrix");
    sys.disc = std::move(disc);
    sys.bloch = bloch;
    sys.lambdaHat = lambdaHat;
    return sys;
}

std::shared_ptr<const Discretization> finish(TriMesh mesh, double radius, int mArc, CutPolicy policy)
{
    auto d = std::make_shared<Discretization>();
    d->mesh = std::move(mesh);
    if (radius > 0.0) d->inclusions = mesh_inclusions(d->mesh, radius);
    d->cut = cut_mesh(d->mesh, d->inclusions, mArc, policy);
    d->dofs = build_dofmap(d->mesh, d->cut);
    return d;
}

}  // namespace

std::shared_ptr<const Discretization> discretize_torus(const HexLattice& lattice, int N, double radius, int mArc,
                                                       CutPolicy policy)
{
    return finish(build_torus_mesh(lattice, N), radius, mArc, policy);
}

std::shared_ptr<const Discretization> discretize_cylinder(const HexLattice& lattice, int N, int L, double radius,
                                                          int mArc, CutPolicy policy)
{
    return finish(build_cylinder_mesh(lattice, N, L), radius, mArc, policy);
}

std::pair<double, double> kappa_weights(double area1, double area2, double normW1, double normW2)
{
    if (area1 < 0.0 || area2 < 0.0) throw GeometryError("negative sub-cell area");
    if (area1 == 0.0 && area2 == 0.0) throw GeometryError("malformed cut: both sub-cell areas vanish");
    const double k1 = normW2 * area1 / (normW2 * area1 + normW1 * area2);
    return {k1, 1.0 - k1};
}

double lambda_K(double h, double area1, double area2, double gammaLength, double normW1, double normW2)
{
    if (area1 == 0.0 && area2 == 0.0) throw GeometryError("malformed cut: both sub-cell areas vanish");
    return h * normW1 * normW2 * gammaLength / (normW2 * area1 + normW1 * area2);
}

NitscheSystem assemble_bulk(std::shared_ptr<const Discretization> disc, const Material& material, const Vec2& k,
                            double lambdaHat)
{
    if (disc->mesh.topology != Topology::Torus) throw Error("assemble_bulk needs a torus discretization");
    return assemble(std::move(disc), material, BlochParams::torus(k), lambdaHat);
}

NitscheSystem assemble_edge(std::shared_ptr<const Discretization> disc, const Material& material, double kPar,
                            double lambdaHat)
{
    if (disc->mesh.topology != Topology::Cylinder) throw Error("assemble_edge needs a cylinder discretization");
    const BlochParams bloch = BlochParams::cylinder(kPar, disc->mesh.lattice);
    return assemble(std::move(disc), material, bloch, lambdaHat);
}

SpMat energy_norm_matrix(const Discretization& disc, const Vec2& k)
{
    return to_sparse(disc.size(), integrate(disc, nullptr, k, 1.0).a);
}

double energy_norm(const VecXc& vec, const NitscheSystem& system)
{
    if (vec.size() != system.size()) throw Error("vector size does not match the system");
    const SpMat G = energy_norm_matrix(*system.disc, system.bloch.k);
    const double q = vec.dot(G * vec).real();
    return std::sqrt(std::max(q, 0.0));
}

double max_abs(const SpMat& M)
{
    double m = 0.0;
    for (int c = 0; c < M.outerSize(); ++c)
        for (SpMat::InnerIterator it(M, c); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

double hermitian_defect(const SpMat& M)
{
    const SpMat D = M - SpMat(M.adjoint());
    return max_abs(D);
}

void write_matrix(std::ostream& os, const SpMat& M)
{
    os << M.rows() << ' ' << M.cols() << ' ' << M.nonZeros() << "\n" << std::setprecision(17);
    for (int c = 0; c < M.outerSize(); ++c)
        for (SpMat::InnerIterator it(M, c); it; ++it)
            os << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << "\n";
}

}  // namespace bloch_nitsche
