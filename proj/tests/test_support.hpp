#pragma once
// Shared helpers for the unit and acceptance tests: seeded random smooth
// fields and small norms.

#include <cstdint>
#include <random>

#include "wavecore/grid.hpp"

namespace testsupport {

using wavecore::Grid;
using wavecore::RField;

// Random band-limited real field: sum of a few Fourier modes with random phases
// and amplitudes decaying in |k|.
RField random_smooth(const Grid& g, std::mt19937_64& rng, int modes = 6);

double linf(const RField& a);
double linf_diff(const RField& a, const RField& b);
double l2(const Grid& g, const RField& a);
double inner(const Grid& g, const RField& a, const RField& b);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace testsupport
