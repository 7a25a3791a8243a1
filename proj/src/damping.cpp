#include "smd/damping.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "smd/quadrature.hpp"

namespace smd {

namespace {

constexpr double kFourthRootOfTwo = 1.1892071150027210667;

void check_height(double z, const DomainParams& dom) {
    if (!(z >= 0.0 && z <= dom.box_length))
        throw std::domain_error("height z outside [0, L]");
}

double int_pow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= double(n - k + i) / double(i);
    return r;
}

// contact piece (z/L)^a (1 - z/L)^a shared by both wall ends of the hermite profile
double contact_value(double z, double length, int alpha) {
    const double s = z / length;
    return int_pow(s * (1.0 - s), alpha);
}

double contact_slope(double z, double length, int alpha) {
    if (alpha == 0) return 0.0;
    const double s = z / length;
    return alpha / length * int_pow(s * (1.0 - s), alpha - 1) * (1.0 - 2.0 * s);
}

// Solve a small dense system by Gaussian elimination with partial pivoting.
template <int N>
std::array<double, N> solve_linear(std::array<std::array<double, N>, N> a,
                                   std::array<double, N> b) {
    for (int col = 0; col < N; ++col) {
        int pivot = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        if (a[col][col] == 0.0)
            throw std::runtime_error("singular junction-matching system");
        for (int r = col + 1; r < N; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < N; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::array<double, N> x{};
    for (int r = N - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < N; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

double table_value(const std::vector<std::pair<double, double>>& t, double z) {
    if (z <= t.front().first) return t.front().second;
    if (z >= t.back().first) return t.back().second;
    auto it = std::upper_bound(t.begin(), t.end(), z,
                               [](double v, const auto& p) { return v < p.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double s = (z - lo.first) / (hi.first - lo.first);
    return lo.second + s * (hi.second - lo.second);
}

double table_slope(const std::vector<std::pair<double, double>>& t, double z, int side) {
    if (z < t.front().first || (z == t.front().first && side < 0)) return 0.0;
    if (z > t.back().first || (z == t.back().first && side > 0)) return 0.0;
    for (std::size_t s = 0; s + 1 < t.size(); ++s) {
        const double lo = t[s].first, hi = t[s + 1].first;
        const bool inside = (side < 0) ? (z > lo && z <= hi) : (z >= lo && z < hi);
        if (inside) return (t[s + 1].second - t[s].second) / (hi - lo);
    }
    return 0.0;
}

// exact integral of the piecewise-linear table (with constant extension) over [a, b]
double table_integral(const std::vector<std::pair<double, double>>& t, double a, double b) {
    double total = 0.0;
    auto segment = [&](double lo, double hi, double flo, double fhi) {
        const double za = std::max(a, lo), zb = std::min(b, hi);
        if (zb <= za) return;
        auto at = [&](double z) { return flo + (z - lo) / (hi - lo) * (fhi - flo); };
        total += 0.5 * (at(za) + at(zb)) * (zb - za);
    };
    // constant extensions outside the table span
    if (a < t.front().first)
        total += (std::min(b, t.front().first) - a) * t.front().second;
    for (std::size_t s = 0; s + 1 < t.size(); ++s)
        segment(t[s].first, t[s + 1].first, t[s].second, t[s + 1].second);
    if (b > t.back().first)
        total += (b - std::max(a, t.back().first)) * t.back().second;
    return total;
}

// breakpoints of the piecewise definition inside (a, b), used to split quadrature
std::vector<double> piece_breaks(const DampingProfile& p, const DomainParams& dom,
                                 double a, double b) {
    std::vector<double> br;
    const double L = dom.box_length;
    const double gl = dom.strip_height();
    switch (p.kind) {
        case ProfileKind::algebraic:
            br = {gl, L - gl};
            break;
        case ProfileKind::hermite:
            br = {gl, 2.0 * gl, L - 2.0 * gl, L - gl};
            break;
        case ProfileKind::tabulated:
            for (const auto& s : p.table) br.push_back(s.first);
            break;
        default:
            break;
    }
    std::vector<double> inside;
    for (double z : br)
        if (z > a && z < b) inside.push_back(z);
    std::sort(inside.begin(), inside.end());
    return inside;
}

}  // namespace

const char* to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::constant_one: return "constant";
        case ProfileKind::van_driest_exact: return "van-driest";
        case ProfileKind::algebraic: return "algebraic";
        case ProfileKind::hermite: return "hermite";
        case ProfileKind::tabulated: return "tabulated";
    }
    return "unknown";
}

WallScales wall_scales(const DomainParams& dom) {
    WallScales s;
    s.u_tau = dom.lid_speed / kFourthRootOfTwo;
    s.a_plus = 26.0;
    s.eps_wall = 0.5 * int_pow(dom.lid_speed, 4) / dom.viscosity;
    s.lid_z = dom.box_length;
    s.viscosity = dom.viscosity;
    return s;
}

DampingProfile constant_profile() {
    DampingProfile p;
    p.kind = ProfileKind::constant_one;
    return p;
}

DampingProfile van_driest_profile() {
    DampingProfile p;
    p.kind = ProfileKind::van_driest_exact;
    return p;
}

DampingProfile algebraic_profile(int alpha) {
    if (alpha < 0) throw std::invalid_argument("contact order alpha must be >= 0");
    DampingProfile p;
    p.kind = ProfileKind::algebraic;
    p.alpha = alpha;
    return p;
}

DampingProfile hermite_profile(const DomainParams& dom, int alpha) {
    DampingProfile p;
    p.kind = ProfileKind::hermite;
    p.alpha = alpha;
    p.coeffs = hermite_coefficients(dom, alpha).solved;
    return p;
}

DampingProfile tabulated_profile(std::vector<std::pair<double, double>> samples,
                                 const DomainParams& dom) {
    if (samples.size() < 2)
        throw std::invalid_argument("tabulated profile needs at least two samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& [z, beta] = samples[i];
        if (!std::isfinite(z) || !std::isfinite(beta))
            throw std::invalid_argument("tabulated profile has a non-finite entry");
        if (z < 0.0 || z > dom.box_length)
            throw std::invalid_argument("tabulated z outside [0, L]");
        if (beta < 0.0)
            throw std::invalid_argument("tabulated beta must be nonnegative");
        if (i > 0 && !(z > samples[i - 1].first))
            throw std::invalid_argument("tabulated z values must be strictly increasing");
    }
    DampingProfile p;
    p.kind = ProfileKind::tabulated;
    p.table = std::move(samples);
    return p;
}

DampingProfile load_tabulated(const std::filesystem::path& path, const DomainParams& dom) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open damping table " + path.string());
    std::vector<std::pair<double, double>> samples;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double z, beta;
        if (!(ss >> z)) continue;  // blank line
        if (!(ss >> beta))
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected two columns (z, beta)");
        double extra;
        if (ss >> extra)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": more than two columns");
        samples.emplace_back(z, beta);
    }
    try {
        return tabulated_profile(std::move(samples), dom);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

double eval_beta(const DampingProfile& profile, double z, const DomainParams& dom) {
    check_height(z, dom);
    const double L = dom.box_length;
    const double gl = dom.strip_height();
    switch (profile.kind) {
        case ProfileKind::constant_one:
            return 1.0;
        case ProfileKind::van_driest_exact:
            return van_driest_exact(z, dom);
        case ProfileKind::algebraic: {
            // wall strips take precedence at the shared junction heights
            const double re = dom.reynolds;
            if (z <= gl) return int_pow(re * z / L, profile.alpha);
            if (z >= L - gl) return int_pow(re * (1.0 - z / L), profile.alpha);
            return 1.0;
        }
        case ProfileKind::hermite: {
            const auto& c = profile.coeffs;
            if (z <= gl || z >= L - gl) return contact_value(z, L, profile.alpha);
            if (z <= 2.0 * gl) {
                const double s = z - gl;
                return ((c.a1 * s + c.b1) * s + c.c1) * s + c.d1;
            }
            if (z >= L - 2.0 * gl) {
                const double t = z + 2.0 * gl - L;
                return (c.a2 * t + c.b2) * t * t + 1.0;
            }
            return 1.0;
        }
        case ProfileKind::tabulated:
            return table_value(profile.table, z);
    }
    throw std::logic_error("unhandled profile kind");
}

double eval_beta_derivative(const DampingProfile& profile, double z,
                            const DomainParams& dom, int side) {
    check_height(z, dom);
    const double L = dom.box_length;
    const double gl = dom.strip_height();
    auto below = [side](double z_, double b) { return side < 0 ? z_ <= b : z_ < b; };
    switch (profile.kind) {
        case ProfileKind::constant_one:
            return 0.0;
        case ProfileKind::van_driest_exact: {
            const WallScales s = wall_scales(dom);
            const double zp = s.z_plus(z);
            return s.u_tau / (s.a_plus * dom.viscosity) * std::exp(-zp / s.a_plus);
        }
        case ProfileKind::algebraic: {
            const double re = dom.reynolds;
            if (profile.alpha == 0) return 0.0;
            if (below(z, gl))
                return profile.alpha * re / L * int_pow(re * z / L, profile.alpha - 1);
            if (!below(z, L - gl))
                return -profile.alpha * re / L * int_pow(re * (1.0 - z / L), profile.alpha - 1);
            return 0.0;
        }
        case ProfileKind::hermite: {
            const auto& c = profile.coeffs;
            if (below(z, gl)) return contact_slope(z, L, profile.alpha);
            if (below(z, 2.0 * gl)) {
                const double s = z - gl;
                return (3.0 * c.a1 * s + 2.0 * c.b1) * s + c.c1;
            }
            if (below(z, L - 2.0 * gl)) return 0.0;
            if (below(z, L - gl)) {
                const double t = z + 2.0 * gl - L;
                return (3.0 * c.a2 * t + 2.0 * c.b2) * t;
            }
            return contact_slope(z, L, profile.alpha);
        }
        case ProfileKind::tabulated:
            return table_slope(profile.table, z, side);
    }
    throw std::logic_error("unhandled profile kind");
}

HermiteDerivation hermite_coefficients(const DomainParams& dom, int alpha) {
    if (alpha < 0) throw std::invalid_argument("contact order alpha must be >= 0");
    const double g = dom.strip_fraction;
    const double L = dom.box_length;
    if (!(g < 0.25))
        throw std::invalid_argument(
            "strip fraction >= 1/4: the five pieces of the hermite profile overlap");

    HermiteDerivation d;

    // closed-form expressions for the blend coefficients, with the common
    // power of gamma factored out so the alpha = 0 cancellations are exact
    const double omg = 1.0 - g;
    const double slope_part = alpha * std::pow(omg, alpha - 1) * (1.0 - 2.0 * g);
    const double value_part = std::pow(omg, alpha);
    HermiteCoefficients& cf = d.closed_form;
    cf.c1 = std::pow(g, alpha - 1) * slope_part / L;
    cf.d1 = int_pow(g * omg, alpha);
    cf.a1 = std::pow(g, alpha - 3) *
            (-2.0 * std::pow(g, -alpha) + slope_part + 2.0 * value_part) / int_pow(L, 3);
    cf.b1 = std::pow(g, alpha - 2) *
            (3.0 * std::pow(g, -alpha) - 2.0 * slope_part - 3.0 * value_part) / (L * L);
    cf.a2 = -cf.a1;
    cf.b2 = std::pow(g, alpha - 2) *
            (-3.0 * std::pow(g, -alpha) + slope_part + 3.0 * value_part) / (L * L);

    // Independent route: impose value and slope continuity of the two cubic
    // blends against the contact pieces and the interior plateau. The outer
    // pieces fix c1 (slope) and d1 (value) directly at z = gL and z = L - gL.
    const double G = g * L;
    const double c1 = contact_slope(G, L, alpha);
    const double d1 = contact_value(G, L, alpha);
    std::array<std::array<double, 4>, 4> A{{{G * G * G, G * G, 0.0, 0.0},
                                            {3.0 * G * G, 2.0 * G, 0.0, 0.0},
                                            {0.0, 0.0, G * G * G, G * G},
                                            {0.0, 0.0, 3.0 * G * G, 2.0 * G}}};
    std::array<double, 4> rhs{1.0 - d1 - c1 * G, -c1, d1 - 1.0, -c1};
    const auto x = solve_linear<4>(A, rhs);
    d.solved = HermiteCoefficients{x[0], x[1], c1, d1, x[2], x[3]};

    auto rel = [](double a, double b) {
        const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
        return std::abs(a - b) / scale;
    };
    d.max_rel_difference = std::max({rel(cf.a1, d.solved.a1), rel(cf.b1, d.solved.b1),
                                     rel(cf.c1, d.solved.c1), rel(cf.d1, d.solved.d1),
                                     rel(cf.a2, d.solved.a2), rel(cf.b2, d.solved.b2)});
    return d;
}

double van_driest_exact(double z, const DomainParams& dom) {
    check_height(z, dom);
    const WallScales s = wall_scales(dom);
    return -std::expm1(-s.z_plus(z) / s.a_plus);
}

double taylor_approx_f_w(double z, const DomainParams& dom, int k) {
    check_height(z, dom);
    if (k < 0) throw std::invalid_argument("series order k must be >= 0");
    const double r = dom.reynolds * (1.0 - z / dom.box_length);
    if (!(r < 1.0))
        throw std::domain_error("z outside the validity strip: Re (1 - z/L) must be < 1");
    const double y = r / (26.0 * kFourthRootOfTwo);
    // truncated expansion of 1 - exp(-y)
    double sum = 0.0, term = 1.0;
    for (int n = 1; n <= k; ++n) {
        term *= -y / n;
        sum -= term;
    }
    return sum;
}

double hermite_envelope_constant(int alpha) {
    if (alpha < 0) throw std::invalid_argument("contact order alpha must be >= 0");
    double c = 0.0;
    for (int j = 0; j <= alpha; j += 2) c += binomial(alpha, j) / (alpha + 1 + j);
    return c;
}

StripIntegral strip_integral(const DampingProfile& profile, const DomainParams& dom) {
    const double L = dom.box_length;
    const double g = dom.strip_fraction;
    const double gl = dom.strip_height();
    StripIntegral out;
    switch (profile.kind) {
        case ProfileKind::constant_one:
            out.closed_form = gl;
            break;
        case ProfileKind::algebraic:
            out.closed_form = L * g * int_pow(dom.gamma_re(), profile.alpha) / (profile.alpha + 1);
            break;
        case ProfileKind::hermite: {
            // alternating binomial expansion of the contact-piece integral
            double sum = 0.0;
            double sign = 1.0;
            for (int j = 0; j <= profile.alpha; ++j) {
                sum += sign * binomial(profile.alpha, j) * int_pow(g, j) /
                       (profile.alpha + 1 + j);
                sign = -sign;
            }
            out.closed_form = L * int_pow(g, profile.alpha + 1) * sum;
            break;
        }
        case ProfileKind::van_driest_exact: {
            const WallScales s = wall_scales(dom);
            const double a = s.a_plus * dom.viscosity / s.u_tau;
            out.closed_form = gl + a * std::expm1(-gl / a);
            break;
        }
        case ProfileKind::tabulated:
            out.closed_form = table_integral(profile.table, L - gl, L);
            break;
    }
    out.quadrature = integrate_beta(profile, dom, L - gl, L, 1e-13);
    out.difference = out.closed_form - out.quadrature;
    return out;
}

double integrate_beta(const DampingProfile& profile, const DomainParams& dom,
                      double a, double b, double tol) {
    if (!(a >= 0.0 && b <= dom.box_length && a <= b))
        throw std::domain_error("integration limits outside [0, L]");
    auto f = [&](double z) { return eval_beta(profile, z, dom); };
    std::vector<double> pts = piece_breaks(profile, dom, a, b);
    pts.insert(pts.begin(), a);
    pts.push_back(b);
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < pts.size(); ++s)
        total += integrate(f, pts[s], pts[s + 1], tol);
    return total;
}

}  // namespace smd
