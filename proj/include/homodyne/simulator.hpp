#pragma once

// Synthetic homodyne runs: a vacuum calibration run followed by a Fock run,
// both passed through an affine detector model.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <thread>
#include <vector>

#include "homodyne/error.hpp"
#include "homodyne/rng.hpp"
#include "homodyne/states.hpp"

namespace homodyne {

enum class Source { vacuum_run, fock_run };

struct QuadratureSample {
  double raw_value = 0.0;
  double phase = 0.0;  // [0, 2pi); unused by rotationally symmetric reconstruction
  Source source = Source::vacuum_run;

  friend bool operator==(const QuadratureSample&, const QuadratureSample&) = default;
};

/// raw = scale * x + offset.  A fraction `dark_fraction` of Fock-run triggers
/// are false and yield a vacuum draw.
struct DetectorModel {
  double scale = 1.0;
  double offset = 0.0;
  double dark_fraction = 0.0;

  void validate() const {
    detail::require_domain(std::isfinite(scale) && scale > 0.0, "detector scale must be > 0");
    detail::require_domain(std::isfinite(offset), "detector offset must be finite");
    detail::require_domain(dark_fraction >= 0.0 && dark_fraction < 1.0,
                           "dark_fraction must lie in [0, 1)");
  }
};

struct RunSpec {
  double eta_true = 0.553;
  std::size_t n_vacuum = 200000;
  std::size_t n_fock = 12000;
  DetectorModel detector{};
  std::uint64_t seed = 42;

  void validate() const {
    detail::require_domain(eta_true >= 0.0 && eta_true <= 1.0, "eta_true must lie in [0, 1]");
    detector.validate();
  }

  /// Mixture weight of |1> in the Fock stream after dark-count contamination.
  double effective_eta() const { return eta_true * (1.0 - detector.dark_fraction); }
};

/// Samples per independent random sub-stream in generate_run.
inline constexpr std::size_t kSamplesPerStream = 4096;

/// Draws one dimensionless quadrature from marginal_density(state, .) by
/// inverting the CDF; `uniform` must return values in (0, 1).
template <class UniformSource>
double sample_quadrature(const MixtureState& state, UniformSource&& uniform) {
  const double u = uniform();
  if (u < 0.5) return marginal_quantile(state, u);
  return marginal_isf(state, 1.0 - u);
}

inline double sample_quadrature(const MixtureState& state, RandomStream& stream) {
  return sample_quadrature(state, [&stream] { return stream.uniform(); });
}

namespace detail {

inline double uniform_phase(RandomStream& stream) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const double phase = kTwoPi * stream.uniform();
  return phase < kTwoPi ? phase : std::nextafter(kTwoPi, 0.0);
}

// Fills samples [begin, end) of the logical sequence; each block of
// kSamplesPerStream indices owns one sub-stream.
inline void generate_range(const RunSpec& spec, std::size_t first_block, std::size_t last_block,
                           std::vector<QuadratureSample>& out) {
  const MixtureState vacuum = MixtureState::vacuum();
  const MixtureState fock(spec.eta_true);
  const std::size_t total = out.size();
  for (std::size_t block = first_block; block < last_block; ++block) {
    RandomStream stream(spec.seed, block);
    const std::size_t begin = block * kSamplesPerStream;
    const std::size_t end = std::min(total, begin + kSamplesPerStream);
    for (std::size_t i = begin; i < end; ++i) {
      QuadratureSample& s = out[i];
      double x;
      if (i < spec.n_vacuum) {
        s.source = Source::vacuum_run;
        x = sample_quadrature(vacuum, stream);
      } else {
        s.source = Source::fock_run;
        const bool dark = stream.uniform() < spec.detector.dark_fraction;
        x = sample_quadrature(dark ? vacuum : fock, stream);
      }
      s.raw_value = spec.detector.scale * x + spec.detector.offset;
      s.phase = uniform_phase(stream);
    }
  }
}

}  // namespace detail

/// Generates n_vacuum vacuum-run samples followed by n_fock Fock-run samples.
/// The output is a pure function of `spec`; `threads` only changes how the
/// fixed sub-stream blocks are distributed.
inline std::vector<QuadratureSample> generate_run(const RunSpec& spec, unsigned threads = 1) {
  spec.validate();
  std::vector<QuadratureSample> out(spec.n_vacuum + spec.n_fock);
  const std::size_t blocks = (out.size() + kSamplesPerStream - 1) / kSamplesPerStream;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
  if (threads <= 1) {
    detail::generate_range(spec, 0, blocks, out);
    return out;
  }
  {
    std::vector<std::jthread> workers;
    const std::size_t per_thread = (blocks + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t first = t * per_thread;
      const std::size_t last = std::min(blocks, first + per_thread);
      if (first >= last) break;
      workers.emplace_back(
          [&spec, &out, first, last] { detail::generate_range(spec, first, last, out); });
    }
  }
  return out;
}

}  // namespace homodyne
