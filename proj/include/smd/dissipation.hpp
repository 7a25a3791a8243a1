#pragma once

#include <iosfwd>
#include <vector>

#include "smd/core.hpp"
#include "smd/damping.hpp"

namespace smd {

struct EpsSplit {
    double viscous = 0.0;  // (1/|O|) int nu |grad u|^2
    double model = 0.0;    // (1/|O|) int (c_s d)^2 beta |grad u|^3
    double total() const { return viscous + model; }
};

/// Volume-averaged dissipation of the field: |grad u| is the Frobenius norm
/// of the full velocity-gradient tensor at cell centers, midpoint rule in
/// space. Ghost layers are refreshed before evaluation.
EpsSplit eps_instant(VelocityField& f, const DampingProfile& profile,
                     const DomainParams& dom, const Grid& g);

/// Kinetic energy (1/2) int |u|^2 with components averaged to cell centers.
double kinetic_energy(VelocityField& f, const DomainParams& dom, const Grid& g);

struct DissipationRecord {
    double time = 0.0;
    double kinetic_energy = 0.0;
    double eps_viscous = 0.0;
    double eps_model = 0.0;
    double eps_total = 0.0;
    double running_average = 0.0;  // trapezoidal time mean of eps_total
};

/// Accumulates the running time average of the total dissipation and keeps
/// the whole sample series. Samples must arrive with strictly increasing
/// times after the first.
class DissipationSeries {
public:
    DissipationRecord& add(double time, double ke, double eps_viscous, double eps_model);

    const std::vector<DissipationRecord>& records() const { return records_; }
    bool empty() const { return records_.empty(); }
    const DissipationRecord& back() const { return records_.back(); }

    /// Largest running average seen over the trailing fraction of the time
    /// horizon (default: final quarter); a finite-horizon stand-in for the
    /// limit-superior of the time average.
    double limsup_proxy(double trailing_fraction = 0.25) const;

    void write_csv(std::ostream& out) const;

private:
    std::vector<DissipationRecord> records_;
    double integral_ = 0.0;
};

}  // namespace smd
