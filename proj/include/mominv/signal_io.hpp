#pragma once
// Serialization for signal models and data files.
//
// Model JSON:
//   {"interval": [a, b], "breakpoints": [x1, ...], "pieces": [{piece}, ...]}
// with pieces one of
//   {"kind": "polynomial", "coeffs": [c0, c1, ...]}
//   {"kind": "sinusoid", "amplitude": A, "omega": w, "phase": p}
//   {"kind": "exponential", "alpha": a, "beta": b}
//   {"kind": "rational", "numerator": [...], "denominator": [...]}
//   {"kind": "ode", "op": [[p0 coeffs], [p1 coeffs], ...], "init": [...]}
//
// Moments CSV: header "k,m_k", one row per index, k contiguous from 0.
// Samples CSV: header "x,f", uniform grid rows in order.
// Doubles are written with enough digits to round-trip exactly.

#include <string>

#include "mominv/shiftop.hpp"
#include "mominv/signal.hpp"

namespace mominv {

PiecewiseSignal signal_from_json(const std::string& text);
std::string signal_to_json(const PiecewiseSignal& f);
PiecewiseSignal load_signal(const std::string& path);

void save_moments_csv(const std::string& path, const MomentSequence& m);
// the CSV carries no interval; the caller supplies it (from the model file)
MomentSequence load_moments_csv(const std::string& path, double a, double b);

void save_samples_csv(const std::string& path, const SampledSignal& s);
SampledSignal load_samples_csv(const std::string& path);

// round-trip-exact decimal rendering used in all text outputs
std::string format_double(double v);

}  // namespace mominv
