#pragma once

#include <string>
#include <utility>
#include <vector>

namespace slabgreen {

// Uniform node-centered grid on [0, r_max] x Z with Z = [0,1] (slab) or [-pi, pi) (periodic).
// Slab mode has n_z + 1 rows including both walls; periodic mode has n_z rows with
// the node at z = pi identified with z = -pi.
struct AxiGrid {
    double r_max = 1.0;
    int n_r = 8;
    int n_z = 8;
    bool periodic = false;

    double hr() const { return r_max / n_r; }
    double extent() const;
    double z0() const;
    double hz() const { return extent() / n_z; }
    int nr_nodes() const { return n_r + 1; }
    int nz_nodes() const { return periodic ? n_z : n_z + 1; }
    std::size_t size() const { return static_cast<std::size_t>(nr_nodes()) * nz_nodes(); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * nz_nodes() + j; }
    double r(int i) const { return i * hr(); }
    double z(int j) const { return z0() + j * hz(); }
    bool is_wall(int j) const { return !periodic && (j == 0 || j == n_z); }
    void validate() const;  // throws GridTooCoarse / InvalidArgument
    bool operator==(const AxiGrid& o) const = default;
};

struct AxiScalarField {
    AxiGrid grid;
    std::vector<double> v;

    AxiScalarField() = default;
    explicit AxiScalarField(const AxiGrid& g) : grid(g), v(g.size(), 0.0) {}
    double& operator()(int i, int j) { return v[grid.index(i, j)]; }
    double operator()(int i, int j) const { return v[grid.index(i, j)]; }
    double max_abs() const;
};

struct AxiVectorField {
    AxiGrid grid;
    AxiScalarField ur, ut, uz;

    AxiVectorField() = default;
    explicit AxiVectorField(const AxiGrid& g) : grid(g), ur(g), ut(g), uz(g) {}
};

// Parity across the axis: odd for u^r, u^theta and vorticity w^r, w^theta; even for u^z, p, w^z.
enum class Parity { Odd, Even };

// First and second partial derivatives with the stencil conventions shared by every operator:
// central in the interior, second-order one-sided at r = r_max and at slab walls, parity ghosts at r = 0.
AxiScalarField d_r(const AxiScalarField& f, Parity parity);
AxiScalarField d_z(const AxiScalarField& f);
AxiScalarField d_rr(const AxiScalarField& f, Parity parity);
AxiScalarField d_zz(const AxiScalarField& f);

// d_rr + (1/r) d_r + d_zz, axis value 2 d_rr + d_zz (even fields only).
AxiScalarField laplacian_scalar(const AxiScalarField& f);
// (Delta - 1/r^2) applied to an odd component; zero on the axis.
AxiScalarField laplacian_swirl(const AxiScalarField& f);

AxiVectorField curl_axisym(const AxiVectorField& u);
AxiScalarField divergence_axisym(const AxiVectorField& u);
AxiScalarField gamma_of(const AxiVectorField& u);

// Radial and vertical weights w_i, omega_j with sum_ij w_i omega_j (divergence_axisym u)_ij = 0
// whenever u vanishes at r = r_max, on slab walls and u^r vanishes on the axis.
std::vector<double> compatibility_weights_r(const AxiGrid& g);
std::vector<double> compatibility_weights_z(const AxiGrid& g);

struct BoundaryIdentityReport {
    double max_dz_wr_wall = 0.0;     // sup over z in {0,1} of |d_z w^r|
    double max_wz_wall = 0.0;        // sup over z in {0,1} of |w^z|
    double max_wr_column_integral = 0.0;  // max over r of |trapezoid int_0^1 w^r dz|
};
BoundaryIdentityReport boundary_identities(const AxiVectorField& u);

struct NsResidual {
    AxiScalarField r_mom, t_mom, z_mom, continuity;
    double max_momentum() const;
    double max_all() const;
};
// Pointwise residual of the steady axisymmetric Navier-Stokes system with unit viscosity.
// `forcing` may be null for the unforced system.
NsResidual ns_residual(const AxiVectorField& u, const AxiScalarField& p, const AxiVectorField* forcing = nullptr);

// Cylindrical |grad u|^2 at every node, including the (u^r/r)^2 + (u^theta/r)^2 hoop terms.
AxiScalarField grad_norm_sq(const AxiVectorField& u);

// Trapezoid integral over the cross-section of f(r,z) * weight(r), weight = r when `cylindrical`.
double integrate_rz(const AxiScalarField& f, bool cylindrical);

struct MeanValueReport {
    double ratio_value = 0.0;     // max |u(x)| / (r0^-3 int_B |u|)
    double ratio_gradient = 0.0;  // max |grad u(x)| / (r0^-4 int_B |u - u_B|)
    double worst_r = 0.0, worst_z = 0.0;
    int samples = 0;
};
// Sampled over admissible nodes with the given stride in each direction.
MeanValueReport mean_value_check(const AxiVectorField& u, double r0, int stride = 4);

struct DecayFit {
    double alpha = 0.0;
    double beta = 0.0;
    double r1 = 0.0, r2 = 0.0;
    double rms = 0.0;
    int points = 0;
};
// Least squares log g = alpha log r + beta log log r + c over samples in [r1, r2].
// Samples below 1e3 eps times the profile maximum are dropped as noise.
// Needs at least one more sample than fitted coefficients; throws WindowDegenerate otherwise.
DecayFit fit_decay_profile(const std::vector<double>& r, const std::vector<double>& g, double r1, double r2,
                           bool fit_beta = true);
// Profile max_z |g(r, .)|, window required inside [r_max/8, r_max/2].
DecayFit fit_decay(const AxiScalarField& g, double r1, double r2, bool fit_beta = true);
// Same for the pointwise Euclidean norm of several components.
DecayFit fit_decay(const std::vector<const AxiScalarField*>& components, double r1, double r2, bool fit_beta = true);

enum class FieldFormat { Csv, Binary };

// Named components sharing one grid.
struct FieldBundle {
    AxiGrid grid;
    std::vector<std::pair<std::string, AxiScalarField>> components;
    const AxiScalarField& at(const std::string& name) const;
};

// First line: JSON header {grid, components, mode, format}; then CSV rows (i,j,components...) or raw
// little-endian doubles component-major. Values round-trip bit-exactly.
void save_fields(const std::string& path, const FieldBundle& b, FieldFormat format);
FieldBundle load_fields(const std::string& path);

}  // namespace slabgreen
