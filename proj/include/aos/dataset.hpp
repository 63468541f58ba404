#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aos/common.hpp"

namespace aos {

struct DatasetMeta {
  std::string scheme;       // behavior that produced the tuples
  std::string config_hash;  // provenance of the generating config
  std::uint64_t seed = 0;
  int feature_len = 0;
  int actions = 0;  // number of joint actions (idle + relays)
  std::vector<double> scaler_mean, scaler_sd;
};

// Experience tuples stored flat: [s (F), n, m, u, s' (F)] per record. The
// joint action is the pair (n, m); index 0 is idle, index m in 1..K samples
// through relay m-1.
class Dataset {
 public:
  Dataset() = default;
  Dataset(DatasetMeta meta) : meta_(std::move(meta)) {}

  long size() const { return count_; }
  int feature_len() const { return meta_.feature_len; }
  const DatasetMeta& meta() const { return meta_; }
  DatasetMeta& meta() { return meta_; }

  std::span<const double> s(long i) const;
  std::span<const double> s2(long i) const;
  int n(long i) const;
  int m(long i) const;
  int action(long i) const { int nn = n(i); return nn == 0 ? 0 : m(i); }
  double u(long i) const;

  void add(std::span<const double> s, int n, int m, double u,
           std::span<const double> s2);
  void append_record(const Dataset& other, long i);

  // Structural checks on every record; throws IoError on violation.
  void validate() const;

 private:
  long stride() const { return 2L * meta_.feature_len + 3; }
  const double* rec(long i) const;

  DatasetMeta meta_;
  std::vector<double> data_;
  long count_ = 0;
};

void save_dataset(const Dataset& ds, const std::string& path);

// Fail-closed: bad magic, truncation, checksum mismatch, or out-of-domain
// records raise IoError.
Dataset load_dataset(const std::string& path);

std::vector<std::uint32_t> sample_without_replacement(long n, long k, Rng& rng);

// Draws round(fraction * size) tuples from `expert` and the rest from `filler`,
// then shuffles. Both inputs must agree on feature length and action count.
Dataset mix_datasets(const Dataset& expert, const Dataset& filler,
                     double fraction, long size, Rng& rng);

}  // namespace aos
