#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "smd/core.hpp"
#include "smd/damping.hpp"
#include "smd/dissipation.hpp"

namespace smd {

enum class InitialCondition { couette, perturbed_couette, checkpoint };

struct SolverConfig {
    double cfl = 0.4;
    double projection_tolerance = 1e-10;
    double end_time = 1.0;
    double sample_interval = 0.0;  // 0: sample every step
    bool deterministic_reduction = true;
    InitialCondition initial_condition = InitialCondition::couette;
    double perturbation_amplitude = 0.0;
    std::uint64_t seed = 1;
    std::string checkpoint_path;
    long max_steps = 0;            // 0: no cap
    double steady_tolerance = 0.0; // >0: stop once max |du| per step < tol * U
    double ke_guard_factor = 100.0;
    bool collect_step_diagnostics = false;

    void validate() const;
};

struct StepInfo {
    double time = 0.0;
    double dt = 0.0;
    double max_divergence = 0.0;
    double nu_eff_max = 0.0;
    double max_velocity_change = 0.0;
};

struct RunResult {
    DissipationSeries series;
    std::vector<StepInfo> steps;  // filled when collect_step_diagnostics is set
    long step_count = 0;
    bool reached_steady = false;
};

/// Explicit time integrator for the damped-Smagorinsky shear box: two-stage
/// Runge-Kutta for advection and stress divergence, pressure projection after
/// each stage. Owns the velocity field for the duration of the run.
class Solver {
public:
    Solver(VelocityField initial, DampingProfile profile, DomainParams dom, Grid grid,
           SolverConfig config);
    ~Solver();
    Solver(Solver&&) noexcept;
    Solver& operator=(Solver&&) noexcept;

    /// One time step; dt is the CFL/diffusion-limited value capped by dt_cap.
    StepInfo advance(double dt_cap = std::numeric_limits<double>::infinity());

    /// March to end_time (or max_steps / steady state), sampling dissipation
    /// diagnostics at the configured cadence. Aborts with an error if the
    /// kinetic energy exceeds ke_guard_factor times its running median.
    RunResult run();

    VelocityField& field();
    const VelocityField& field() const;
    const Grid& grid() const;
    const DomainParams& domain() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// --- initial conditions ---

VelocityField couette_field(const Grid& g, const DomainParams& dom);

/// Couette profile plus seeded divergence-free trigonometric perturbation
/// (amplitude in units of the lid speed), projected to the discrete
/// divergence-free space.
VelocityField perturbed_couette_field(const Grid& g, const DomainParams& dom,
                                      double amplitude, std::uint64_t seed);

// --- discrete-structure diagnostics ---

/// Energy rate of the skew advection operator: sum over components of
/// (N(advecting, advected), advected). Vanishes to roundoff when the
/// advecting field is discretely divergence-free with impermeable walls.
double advection_energy_rate(VelocityField& advecting, VelocityField& advected,
                             const Grid& g, const DomainParams& dom,
                             double advected_lid_speed);

struct FaceDissipation {
    double viscous = 0.0;  // int nu |grad u|^2 over the box (face-based)
    double model = 0.0;    // int beta (c_s d)^2 |grad u| |grad u|^2, face-based
};

/// Face-based dissipation integrals matching the stress discretization; the
/// model part is the (sign-definite) energy drain of the eddy-viscosity term.
FaceDissipation face_dissipation(VelocityField& f, const DampingProfile& profile,
                                 const DomainParams& dom, const Grid& g);

/// Power injected through the moving lid, from the same one-sided wall flux
/// the momentum update uses. Together with face_dissipation this closes the
/// semi-discrete energy budget.
double lid_power(VelocityField& f, const DampingProfile& profile,
                 const DomainParams& dom, const Grid& g);

/// Kinetic energy in the native staggered inner product (one full cell
/// volume per velocity degree of freedom). This is the quantity whose
/// semi-discrete budget closes exactly against lid_power and
/// face_dissipation.
double staggered_kinetic_energy(const VelocityField& f, const Grid& g);

/// Project a field onto the discrete divergence-free space (one pressure
/// solve); ghosts are refreshed with the given lid speed.
void project_field(VelocityField& f, const Grid& g, double lid_speed);

// --- checkpoints ---

struct Checkpoint {
    DomainParams domain;
    Grid grid;
    VelocityField field;
};

void save_checkpoint(const std::filesystem::path& path, const VelocityField& f,
                     const DomainParams& dom, const Grid& g);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// --- one-dimensional steady oracle ---

/// Steady unidirectional shear profile: the total stress
/// (nu + beta(z) (c_s d)^2 |u'|) u' is a constant tau found by bisection so
/// that the profile spans 0 at the floor to U at the lid.
struct SteadyShearProfile {
    std::vector<double> z_nodes;
    std::vector<double> u_of_z;
    double tau = 0.0;
    double residual = 0.0;  // max pointwise defect of the stress relation

    DampingProfile profile;
    DomainParams domain;

    double evaluate(double z) const;

    /// (1/L) int nu u'^2 + (c_s d)^2 beta |u'|^3 dz for the solved profile.
    double dissipation() const;
};

SteadyShearProfile steady_shear_profile(const DampingProfile& profile,
                                        const DomainParams& dom, int n_nodes);

}  // namespace smd
