#include "aos/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace aos {

namespace {
constexpr char kMagic[8] = {'A', 'O', 'S', 'D', 'A', 'T', 'A', '1'};
}

const double* Dataset::rec(long i) const {
  if (i < 0 || i >= count_) throw StructuralError("dataset index out of range");
  return data_.data() + static_cast<std::size_t>(i) * stride();
}

std::span<const double> Dataset::s(long i) const {
  return {rec(i), static_cast<std::size_t>(meta_.feature_len)};
}

std::span<const double> Dataset::s2(long i) const {
  return {rec(i) + meta_.feature_len + 3,
          static_cast<std::size_t>(meta_.feature_len)};
}

int Dataset::n(long i) const {
  return static_cast<int>(rec(i)[meta_.feature_len]);
}

int Dataset::m(long i) const {
  return static_cast<int>(rec(i)[meta_.feature_len + 1]);
}

double Dataset::u(long i) const { return rec(i)[meta_.feature_len + 2]; }

void Dataset::add(std::span<const double> s, int n, int m, double u,
                  std::span<const double> s2) {
  if (static_cast<int>(s.size()) != meta_.feature_len ||
      static_cast<int>(s2.size()) != meta_.feature_len)
    throw StructuralError("feature length mismatch on dataset add");
  data_.insert(data_.end(), s.begin(), s.end());
  data_.push_back(n);
  data_.push_back(m);
  data_.push_back(u);
  data_.insert(data_.end(), s2.begin(), s2.end());
  ++count_;
}

void Dataset::append_record(const Dataset& other, long i) {
  if (other.meta_.feature_len != meta_.feature_len)
    throw StructuralError("feature length mismatch on dataset append");
  const double* r = other.rec(i);
  data_.insert(data_.end(), r, r + stride());
  ++count_;
}

void Dataset::validate() const {
  if (meta_.feature_len < 1) throw IoError("dataset has no feature layout");
  if (meta_.actions < 2) throw IoError("dataset needs at least two actions");
  if (static_cast<long>(data_.size()) != count_ * stride())
    throw IoError("dataset payload size does not match record count");
  const int K = meta_.actions - 1;
  for (long i = 0; i < count_; ++i) {
    const double* r = rec(i);
    for (long j = 0; j < stride(); ++j)
      if (!std::isfinite(r[j])) throw IoError("non-finite value in dataset record");
    double nn = r[meta_.feature_len];
    double mm = r[meta_.feature_len + 1];
    double uu = r[meta_.feature_len + 2];
    if (nn != 0.0 && nn != 1.0) throw IoError("dataset action flag must be 0 or 1");
    if (mm != std::floor(mm) || mm < 0 || mm > K)
      throw IoError("dataset relay index out of range");
    if (nn == 0.0 && mm != 0.0)
      throw IoError("idle records must carry relay index 0");
    if (nn == 1.0 && mm == 0.0)
      throw IoError("sampling records must name a relay");
    if (!(uu > 0.0 && uu <= 1.0)) throw IoError("utility outside (0,1]");
  }
}

void save_dataset(const Dataset& ds, const std::string& path) {
  ds.validate();
  const DatasetMeta& m = ds.meta();
  nlohmann::json hdr;
  hdr["format"] = "aos-data-1";
  hdr["scheme"] = m.scheme;
  hdr["config_hash"] = m.config_hash;
  hdr["seed"] = m.seed;
  hdr["count"] = ds.size();
  hdr["feature_len"] = m.feature_len;
  hdr["actions"] = m.actions;
  hdr["scaler_mean"] = m.scaler_mean;
  hdr["scaler_sd"] = m.scaler_sd;
  std::string hs = hdr.dump();

  std::string buf;
  buf.append(kMagic, sizeof(kMagic));
  std::uint32_t hlen = static_cast<std::uint32_t>(hs.size());
  buf.append(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  buf.append(hs);
  for (long i = 0; i < ds.size(); ++i) {
    auto sf = ds.s(i);
    std::size_t off = buf.size();
    long stride = 2L * m.feature_len + 3;
    buf.resize(off + static_cast<std::size_t>(stride) * sizeof(double));
    std::memcpy(buf.data() + off, sf.data(),
                static_cast<std::size_t>(stride) * sizeof(double));
  }
  std::uint64_t sum = fnv1a64(buf.data(), buf.size());
  buf.append(reinterpret_cast<const char*>(&sum), sizeof(sum));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open dataset for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("short write on dataset: " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < sizeof(kMagic) + sizeof(std::uint32_t) + sizeof(std::uint64_t))
    throw IoError("dataset too short: " + path);
  if (std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
    throw IoError("bad dataset magic: " + path);

  std::uint64_t stored;
  std::memcpy(&stored, buf.data() + buf.size() - sizeof(stored), sizeof(stored));
  if (stored != fnv1a64(buf.data(), buf.size() - sizeof(stored)))
    throw IoError("dataset checksum mismatch: " + path);

  std::size_t off = sizeof(kMagic);
  std::uint32_t hlen;
  std::memcpy(&hlen, buf.data() + off, sizeof(hlen));
  off += sizeof(hlen);
  if (off + hlen > buf.size() - sizeof(stored))
    throw IoError("dataset header overruns file: " + path);
  nlohmann::json hdr;
  try {
    hdr = nlohmann::json::parse(buf.substr(off, hlen));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad dataset header: ") + e.what());
  }
  off += hlen;
  if (hdr.value("format", "") != std::string("aos-data-1"))
    throw IoError("unsupported dataset format: " + path);

  DatasetMeta meta;
  meta.scheme = hdr.value("scheme", "");
  meta.config_hash = hdr.value("config_hash", "");
  meta.seed = hdr.value("seed", 0ULL);
  meta.feature_len = hdr.at("feature_len").get<int>();
  meta.actions = hdr.at("actions").get<int>();
  meta.scaler_mean = hdr.value("scaler_mean", std::vector<double>{});
  meta.scaler_sd = hdr.value("scaler_sd", std::vector<double>{});
  long count = hdr.at("count").get<long>();
  if (meta.feature_len < 1 || count < 0)
    throw IoError("dataset header fields out of range: " + path);

  long stride = 2L * meta.feature_len + 3;
  std::size_t payload = buf.size() - sizeof(stored) - off;
  if (payload != static_cast<std::size_t>(count) * stride * sizeof(double))
    throw IoError("dataset payload size disagrees with header: " + path);

  Dataset ds(meta);
  std::vector<double> rec(stride);
  for (long i = 0; i < count; ++i) {
    std::memcpy(rec.data(), buf.data() + off, stride * sizeof(double));
    off += stride * sizeof(double);
    std::span<const double> sf(rec.data(), meta.feature_len);
    std::span<const double> s2f(rec.data() + meta.feature_len + 3, meta.feature_len);
    ds.add(sf, static_cast<int>(rec[meta.feature_len]),
           static_cast<int>(rec[meta.feature_len + 1]), rec[meta.feature_len + 2],
           s2f);
  }
  ds.validate();
  return ds;
}

std::vector<std::uint32_t> sample_without_replacement(long n, long k, Rng& rng) {
  if (k > n || k < 0) throw StructuralError("cannot sample more than population");
  std::vector<std::uint32_t> idx(n);
  for (long i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
  for (long i = 0; i < k; ++i) {
    std::uniform_int_distribution<long> d(i, n - 1);
    std::swap(idx[i], idx[d(rng)]);
  }
  idx.resize(k);
  return idx;
}

Dataset mix_datasets(const Dataset& expert, const Dataset& filler,
                     double fraction, long size, Rng& rng) {
  if (fraction < 0 || fraction > 1)
    throw StructuralError("mix fraction must lie in [0,1]");
  if (expert.feature_len() != filler.feature_len() ||
      expert.meta().actions != filler.meta().actions)
    throw StructuralError("datasets disagree on layout");
  long want_e = std::lround(fraction * size);
  long want_f = size - want_e;
  if (want_e > expert.size() || want_f > filler.size())
    throw StructuralError("mix size exceeds source datasets");

  DatasetMeta meta = expert.meta();
  meta.scheme = expert.meta().scheme + "+" + filler.meta().scheme;
  Dataset out(meta);
  auto ei = sample_without_replacement(expert.size(), want_e, rng);
  auto fi = sample_without_replacement(filler.size(), want_f, rng);
  struct Pick { bool from_expert; std::uint32_t idx; };
  std::vector<Pick> picks;
  picks.reserve(size);
  for (auto i : ei) picks.push_back({true, i});
  for (auto i : fi) picks.push_back({false, i});
  std::shuffle(picks.begin(), picks.end(), rng);
  for (const Pick& p : picks)
    out.append_record(p.from_expert ? expert : filler, p.idx);
  return out;
}

}  // namespace aos
