#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "casimir/errors.hpp"
#include "casimir/kramers_kronig.hpp"

namespace casimir {

// Material response models along the imaginary frequency axis. All
// frequencies are photon energies in eV; permittivities are dimensionless.
//
//   drude:              eps(i xi) = 1 + wp^2 / (xi (xi + gamma))
//   plasma:             eps(i xi) = 1 + wp^2 / xi^2
//   generalized plasma: plasma + sum_j g_j / (w_j^2 + xi^2 + gamma_j xi)
//   optical table:      Kramers-Kronig transform of tabulated Im eps
//
// eps(i xi) of any causal passive response is real and > 1 for xi > 0, which
// the accessors preserve by construction.

struct DrudeModel {
    double plasma_frequency; // eV, >= 0
    double relaxation;       // eV, > 0

    DrudeModel(double wp, double gamma) : plasma_frequency(wp), relaxation(gamma) {
        if (!(wp >= 0.0)) throw std::domain_error("drude: plasma frequency must be >= 0");
        if (!(gamma > 0.0)) throw std::domain_error("drude: relaxation must be > 0");
    }
};

struct PlasmaModel {
    double plasma_frequency; // eV, >= 0

    explicit PlasmaModel(double wp) : plasma_frequency(wp) {
        if (!(wp >= 0.0)) throw std::domain_error("plasma: plasma frequency must be >= 0");
    }
};

struct Oscillator {
    double strength;  // eV^2, >= 0
    double resonance; // eV, > 0
    double width;     // eV, >= 0

    Oscillator(double g, double omega, double gamma)
        : strength(g), resonance(omega), width(gamma) {
        if (!(g >= 0.0)) throw std::domain_error("oscillator: strength must be >= 0");
        if (!(omega > 0.0)) throw std::domain_error("oscillator: resonance must be > 0");
        if (!(gamma >= 0.0)) throw std::domain_error("oscillator: width must be >= 0");
    }
};

struct GeneralizedPlasmaModel {
    double plasma_frequency; // eV, >= 0
    std::vector<Oscillator> oscillators;

    GeneralizedPlasmaModel(double wp, std::vector<Oscillator> osc)
        : plasma_frequency(wp), oscillators(std::move(osc)) {
        if (!(wp >= 0.0))
            throw std::domain_error("generalized plasma: plasma frequency must be >= 0");
    }
};

// Frequency-independent magnetic permeability: mu(0) enters only the l = 0
// Matsubara term; at l >= 1 the magnetic response of a real ferromagnet has
// already relaxed, so mu = 1 exactly.
struct MagneticResponse {
    double mu0 = 1.0; // >= 1

    MagneticResponse() = default;
    explicit MagneticResponse(double mu_static) : mu0(mu_static) {
        if (!(mu_static >= 1.0)) throw std::domain_error("magnetic: mu(0) must be >= 1");
    }
};

using Response = std::variant<DrudeModel, PlasmaModel, GeneralizedPlasmaModel, OpticalTable>;

struct Material {
    std::string name;
    Response response;
    MagneticResponse magnetic{};

    Material(std::string n, Response r, MagneticResponse m = {})
        : name(std::move(n)), response(std::move(r)), magnetic(m) {}
};

inline double eps_imag(const DrudeModel& m, double xi) {
    if (!(xi > 0.0)) throw std::domain_error("eps_imag: xi must be > 0");
    return 1.0 + m.plasma_frequency * m.plasma_frequency / (xi * (xi + m.relaxation));
}

inline double eps_imag(const PlasmaModel& m, double xi) {
    if (!(xi > 0.0)) throw std::domain_error("eps_imag: xi must be > 0");
    return 1.0 + m.plasma_frequency * m.plasma_frequency / (xi * xi);
}

inline double eps_imag(const GeneralizedPlasmaModel& m, double xi) {
    if (!(xi > 0.0)) throw std::domain_error("eps_imag: xi must be > 0");
    double eps = 1.0 + m.plasma_frequency * m.plasma_frequency / (xi * xi);
    for (const auto& o : m.oscillators)
        eps += o.strength / (o.resonance * o.resonance + xi * xi + o.width * xi);
    return eps;
}

inline double eps_imag(const OpticalTable& m, double xi) { return eps_table_imag(m, xi); }

inline double eps_imag(const Material& m, double xi) {
    return std::visit([xi](const auto& r) { return eps_imag(r, xi); }, m.response);
}

// Permeability at the l-th Matsubara frequency.
inline double mu_imag(const Material& m, int l) {
    if (l < 0) throw std::domain_error("mu_imag: Matsubara index must be >= 0");
    return l == 0 ? m.magnetic.mu0 : 1.0;
}

// Zero-frequency reflection behaviour of a response model. Dissipative
// responses (drude, drude-extrapolated tables) lose the TE zero mode entirely
// for a nonmagnetic material; plasma-like responses keep a finite TE
// reflection controlled by wp. Tables without a low-frequency prescription
// have no defined zero mode at all.
enum class ZeroModeKind { dissipative, plasma_like };

struct ZeroMode {
    ZeroModeKind kind;
    // For plasma_like: controls the surviving TE reflection. For dissipative:
    // only distinguishes conductor (TM reflection 1) from vacuum (0).
    double plasma_frequency = 0.0; // eV
};

inline ZeroMode zero_mode(const Material& m) {
    struct Visitor {
        const Material& mat;
        ZeroMode operator()(const DrudeModel& d) const {
            return {ZeroModeKind::dissipative, d.plasma_frequency};
        }
        ZeroMode operator()(const PlasmaModel& p) const {
            return {ZeroModeKind::plasma_like, p.plasma_frequency};
        }
        ZeroMode operator()(const GeneralizedPlasmaModel& p) const {
            // Oscillator terms stay finite at xi -> 0; only the wp^2/xi^2 pole
            // survives in the reflection limit.
            return {ZeroModeKind::plasma_like, p.plasma_frequency};
        }
        ZeroMode operator()(const OpticalTable& t) const {
            if (const auto* p = std::get_if<PlasmaExtrapolation>(&t.extrapolation()))
                return {ZeroModeKind::plasma_like, p->plasma_frequency};
            if (const auto* d = std::get_if<DrudeExtrapolation>(&t.extrapolation()))
                return {ZeroModeKind::dissipative, d->plasma_frequency};
            throw config_error("material '" + mat.name +
                               "': tabulated response has no low-frequency extrapolation, "
                               "zero-frequency term undefined");
        }
    };
    return std::visit(Visitor{m}, m.response);
}

// Real-frequency Drude permittivity and its gamma -> 0 pointwise limit.
// eps(omega) = 1 - wp^2 / (omega (omega + i gamma)):
//   omega > 0: Re -> 1 - wp^2/omega^2 and Im -> 0 as gamma -> 0,
//   omega = 0: |eps| diverges for every gamma; no limit exists.
inline std::complex<double> eps_drude_real_axis(const DrudeModel& m, double omega) {
    if (!(omega >= 0.0)) throw std::domain_error("eps_drude_real_axis: omega must be >= 0");
    const std::complex<double> z(omega, m.relaxation);
    if (omega == 0.0) {
        // 1 - wp^2/(i omega gamma) as omega->0 at fixed gamma: purely divergent.
        return std::complex<double>(std::numeric_limits<double>::infinity(),
                                    std::numeric_limits<double>::infinity());
    }
    return 1.0 - m.plasma_frequency * m.plasma_frequency / (omega * z);
}

struct DissipationLimitDiagnostic {
    std::vector<std::complex<double>> values; // eps at each gamma in the sequence
    bool limit_finite = false;
    std::complex<double> limit{0.0, 0.0}; // meaningful when limit_finite
};

// Evaluate eps_drude(omega) along a decreasing gamma sequence. Demonstrates
// the non-uniform gamma -> 0 limit that separates the drude and plasma
// approaches at the zero-frequency Matsubara term.
inline DissipationLimitDiagnostic drude_dissipation_limit(double plasma_frequency, double omega,
                                                          const std::vector<double>& gammas) {
    if (!(omega >= 0.0)) throw std::domain_error("drude_dissipation_limit: omega must be >= 0");
    DissipationLimitDiagnostic diag;
    diag.values.reserve(gammas.size());
    for (double g : gammas) {
        DrudeModel m(plasma_frequency, g);
        diag.values.push_back(eps_drude_real_axis(m, omega));
    }
    if (omega > 0.0) {
        diag.limit_finite = true;
        diag.limit = {1.0 - plasma_frequency * plasma_frequency / (omega * omega), 0.0};
    }
    return diag;
}

} // namespace casimir
