#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "explab/adam.hpp"
#include "explab/csv.hpp"
#include "explab/errors.hpp"
#include "explab/mlp.hpp"
#include "explab/rng.hpp"

namespace explab {

// One-dimensional regression demo: an ensemble of small nets fit the same
// noisy samples from independent initializations, and their spread serves as
// an epistemic uncertainty band that should inflate where data is absent.

struct RegressDataset {
  Vector x;
  Vector y;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Smooth two-tone target; wavy enough that the fit is nontrivial, smooth
// enough that 2x32 rectifier nets capture it.
inline double regress_target(double x) { return std::sin(3.0 * x) + 0.5 * std::sin(8.0 * x); }

// Samples points uniformly from the support intervals (round-robin), with
// additive Gaussian observation noise.
inline RegressDataset make_regress_dataset(int n_points, const std::vector<Interval>& support,
                                           double noise, std::uint64_t seed) {
  if (n_points < 1) throw InvalidInputError("make_regress_dataset: need at least one point");
  if (support.empty()) throw InvalidInputError("make_regress_dataset: no support intervals");
  for (const auto& iv : support)
    if (!(iv.lo < iv.hi)) throw InvalidInputError("make_regress_dataset: empty interval");
  RegressDataset data;
  data.x.reserve(static_cast<std::size_t>(n_points));
  data.y.reserve(static_cast<std::size_t>(n_points));
  Rng rng(seed);
  for (int i = 0; i < n_points; ++i) {
    const Interval& iv = support[static_cast<std::size_t>(i) % support.size()];
    const double x = rng.uniform(iv.lo, iv.hi);
    data.x.push_back(x);
    data.y.push_back(regress_target(x) + noise * rng.normal());
  }
  return data;
}

struct RegressEnsemble {
  std::vector<MlpParams> nets;
};

// Full-batch Adam fit of one net on the dataset.
inline MlpParams fit_regress_net(const RegressDataset& data, const std::vector<int>& hidden,
                                 int epochs, double lr, std::uint64_t seed) {
  if (data.x.size() != data.y.size() || data.x.empty())
    throw InvalidInputError("fit_regress_net: bad dataset");
  std::vector<int> dims;
  dims.push_back(1);
  for (int h : hidden) dims.push_back(h);
  dims.push_back(1);
  Rng rng(seed);
  MlpParams net = init_mlp(dims, rng);
  std::vector<double*> params;
  collect_params(net, params);
  AdamState adam(params.size());
  const AdamConfig adam_cfg{lr, 0.9, 0.999, 1e-7};
  const double n = static_cast<double>(data.x.size());
  for (int epoch = 0; epoch < epochs; ++epoch) {
    MlpParams grads = zeros_like(net);
    double loss = 0.0;
    for (std::size_t i = 0; i < data.x.size(); ++i) {
      const Vector input{data.x[i]};
      const MlpForwardCache cache = mlp_forward_cached(net, input);
      const double diff = cache.output[0] - data.y[i];
      loss += diff * diff;
      const Vector grad_out{2.0 * diff / n};
      mlp_backward(net, cache, grad_out, grads);
    }
    if (!std::isfinite(loss)) throw TrainingDivergence("fit_regress_net: non-finite loss");
    std::vector<const double*> gview;
    collect_params(grads, gview);
    adam_step(params, gview, adam, adam_cfg);
  }
  return net;
}

inline RegressEnsemble fit_regress_ensemble_with_seeds(const RegressDataset& data,
                                                       const std::vector<std::uint64_t>& seeds,
                                                       const std::vector<int>& hidden, int epochs,
                                                       double lr) {
  if (seeds.empty()) throw InvalidInputError("fit_regress_ensemble_with_seeds: no seeds");
  RegressEnsemble ensemble;
  ensemble.nets.reserve(seeds.size());
  for (std::uint64_t s : seeds) ensemble.nets.push_back(fit_regress_net(data, hidden, epochs, lr, s));
  return ensemble;
}

inline RegressEnsemble fit_regress_ensemble(const RegressDataset& data, int n_nets,
                                            const std::vector<int>& hidden, int epochs, double lr,
                                            std::uint64_t seed) {
  if (n_nets < 1) throw InvalidInputError("fit_regress_ensemble: need at least one net");
  std::vector<std::uint64_t> seeds;
  seeds.reserve(static_cast<std::size_t>(n_nets));
  for (int k = 0; k < n_nets; ++k) seeds.push_back(derive_seed(seed, static_cast<std::uint64_t>(k)));
  return fit_regress_ensemble_with_seeds(data, seeds, hidden, epochs, lr);
}

struct RegressBand {
  double x = 0.0;
  double mean = 0.0;
  double sigma = 0.0;  // population spread across nets
};

inline RegressBand ensemble_band_at(const RegressEnsemble& ensemble, double x) {
  const std::size_t n = ensemble.nets.size();
  if (n == 0) throw InvalidInputError("ensemble_band_at: empty ensemble");
  RegressBand band;
  band.x = x;
  Vector preds(n);
  const Vector input{x};
  for (std::size_t k = 0; k < n; ++k) {
    preds[k] = mlp_forward(ensemble.nets[k], input)[0];
    band.mean += preds[k];
  }
  band.mean /= static_cast<double>(n);
  double var = 0.0;
  for (double p : preds) {
    const double d = p - band.mean;
    var += d * d;
  }
  band.sigma = std::sqrt(var / static_cast<double>(n));
  return band;
}

inline Vector linspace(double lo, double hi, int n) {
  if (n < 2) throw InvalidInputError("linspace: need at least two points");
  Vector out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return out;
}

// Band table over a grid. The one- and two-sigma bands are recoverable from
// (mean, sigma); the wide band and the optimistic curve are materialized so
// the file plots directly.
inline void emit_bands(const RegressEnsemble& ensemble, const Vector& grid,
                       const std::string& path) {
  CsvWriter csv(path, {"x", "mean", "sigma", "mean_minus_2sigma", "mean_plus_2sigma", "gplus"});
  for (double x : grid) {
    const RegressBand band = ensemble_band_at(ensemble, x);
    csv.write_row({format_number(band.x), format_number(band.mean), format_number(band.sigma),
                   format_number(band.mean - 2.0 * band.sigma),
                   format_number(band.mean + 2.0 * band.sigma),
                   format_number(band.mean + band.sigma)});
  }
}

// Mean spread inside versus outside the data support; the demo's headline
// statistic.
struct GapInflation {
  double gap_mean_sigma = 0.0;
  double support_mean_sigma = 0.0;
};

inline GapInflation gap_inflation(const RegressEnsemble& ensemble,
                                  const std::vector<Interval>& support, const Interval& gap,
                                  const Vector& grid) {
  GapInflation stat;
  int gap_count = 0, support_count = 0;
  for (double x : grid) {
    const RegressBand band = ensemble_band_at(ensemble, x);
    if (x > gap.lo && x < gap.hi) {
      stat.gap_mean_sigma += band.sigma;
      ++gap_count;
    } else {
      for (const auto& iv : support)
        if (x >= iv.lo && x <= iv.hi) {
          stat.support_mean_sigma += band.sigma;
          ++support_count;
          break;
        }
    }
  }
  if (gap_count == 0 || support_count == 0)
    throw InvalidInputError("gap_inflation: grid misses the gap or the support");
  stat.gap_mean_sigma /= gap_count;
  stat.support_mean_sigma /= support_count;
  return stat;
}

}  // namespace explab
