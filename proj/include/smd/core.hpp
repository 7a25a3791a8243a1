#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace smd {

/// Physical and model parameters of the sheared periodic box.
/// The strip fraction gamma is tied to the Reynolds number through
/// gamma * Re = kappa / 5.1, so the near-lid strip thins as Re grows.
struct DomainParams {
    double box_length = 1.0;   // L, all three directions
    double lid_speed = 1.0;    // U, speed of the z = L wall
    double viscosity = 1.0;    // kinematic viscosity
    double model_scale = 0.1;  // delta, eddy length scale
    double c_s = 0.1;          // Smagorinsky constant
    double kappa = 1.0;        // strip-fraction knob in (0, 1]

    // derived
    double reynolds = 1.0;        // U L / nu
    double strip_fraction = 0.0;  // gamma = kappa / (5.1 Re)

    // Exact product gamma * Re; formulas use this instead of multiplying
    // the two rounded fields back together.
    double gamma_re() const { return kappa / 5.1; }
    double strip_height() const { return strip_fraction * box_length; }
    double cs_delta() const { return c_s * model_scale; }
};

DomainParams make_domain(double box_length, double lid_speed, double viscosity,
                         double model_scale, double c_s, double kappa = 1.0);

/// Uniform staggered grid over the box: velocity components on face centers,
/// pressure on cell centers, periodic wrap in x and y, ghost layers in z.
struct Grid {
    int nx = 0, ny = 0, nz = 0;
    double hx = 0.0, hy = 0.0, hz = 0.0;
    // true when at least two cell layers fit inside each gamma*L wall strip
    bool strip_resolved = false;

    double min_h() const { return hx < hy ? (hx < hz ? hx : hz) : (hy < hz ? hy : hz); }
    double cell_volume() const { return hx * hy * hz; }
    double z_center(int k) const { return (k + 0.5) * hz; }
    double z_face(int k) const { return k * hz; }
};

Grid make_grid(const DomainParams& dom, int nx, int ny, int nz);

/// Scalar array with one ghost layer on every side. Interior indices run
/// 0..n-1 per direction; -1 and n address the ghosts. Storage is z-major:
/// x fastest, then y, then z.
class Field3 {
public:
    Field3() = default;
    Field3(int nx, int ny, int nz)
        : nx_(nx), ny_(ny), nz_(nz), sx_(nx + 2), sy_(ny + 2),
          data_(static_cast<std::size_t>(nx + 2) * (ny + 2) * (nz + 2), 0.0) {}

    double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
    double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nz() const { return nz_; }

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    void fill(double value) { data_.assign(data_.size(), value); }

private:
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k + 1) * sy_ + (j + 1)) * sx_ + (i + 1);
    }

    int nx_ = 0, ny_ = 0, nz_ = 0;
    int sx_ = 0, sy_ = 0;
    std::vector<double> data_;
};

/// Discrete velocity + pressure state on the staggered grid.
///   u(i,j,k) at (i hx, (j+1/2) hy, (k+1/2) hz)      x-faces, k = 0..nz-1
///   v(i,j,k) at ((i+1/2) hx, j hy, (k+1/2) hz)      y-faces
///   w(i,j,k) at ((i+1/2) hx, (j+1/2) hy, k hz)      z-faces, k = 0..nz
///   p(i,j,k) at cell centers
struct VelocityField {
    Field3 u, v, w, p;
    double time = 0.0;

    VelocityField() = default;
    explicit VelocityField(const Grid& g)
        : u(g.nx, g.ny, g.nz), v(g.nx, g.ny, g.nz),
          w(g.nx, g.ny, g.nz + 1), p(g.nx, g.ny, g.nz) {}
};

/// Fill periodic ghosts in x,y and wall ghosts in z. The z ghosts impose
/// no-slip (0,0,0) at z=0 and (lid_speed,0,0) at z=L by reflection; the
/// wall-normal component is pinned to zero on both wall face planes.
void apply_boundary(VelocityField& f, const Grid& g, double lid_speed);

/// Divergence of (u,v,w) at cell center (i,j,k); ghosts must be current.
double cell_divergence(const VelocityField& f, const Grid& g, int i, int j, int k);

/// Max |divergence| over all cells.
double max_divergence(const VelocityField& f, const Grid& g);

/// Build a unidirectional field u = profile(z), v = w = 0, sampled at the
/// staggered u heights. Ghosts are left to apply_boundary.
VelocityField field_from_profile(const Grid& g, const std::function<double(double)>& u_of_z);

}  // namespace smd
