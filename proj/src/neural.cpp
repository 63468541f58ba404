#include "aos/neural.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace aos {

Tensors Tensors::zeros(const MlpShape& s) {
  Tensors t;
  t.w1.assign(static_cast<std::size_t>(s.hidden) * s.in, 0.0);
  t.b1.assign(s.hidden, 0.0);
  t.w2.assign(static_cast<std::size_t>(s.out) * s.hidden, 0.0);
  t.b2.assign(s.out, 0.0);
  return t;
}

void Tensors::zero() {
  std::fill(w1.begin(), w1.end(), 0.0);
  std::fill(b1.begin(), b1.end(), 0.0);
  std::fill(w2.begin(), w2.end(), 0.0);
  std::fill(b2.begin(), b2.end(), 0.0);
}

std::size_t Tensors::count() const {
  return w1.size() + b1.size() + w2.size() + b2.size();
}

Mlp Mlp::init(const MlpShape& s, std::uint64_t seed) {
  if (s.in < 1 || s.hidden < 1 || s.out < 1)
    throw StructuralError("network dimensions must be positive");
  Mlp net;
  net.shape = s;
  net.p = Tensors::zeros(s);
  Rng rng(derive_seed(seed, 0x313437));
  auto glorot = [&](std::vector<double>& w, int fan_in, int fan_out) {
    double lim = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> d(-lim, lim);
    for (double& v : w) v = d(rng);
  };
  glorot(net.p.w1, s.in, s.hidden);
  glorot(net.p.w2, s.hidden, s.out);
  return net;
}

void forward(const Mlp& net, std::span<const double> x, std::vector<double>& out,
             ForwardCache* cache) {
  const MlpShape& s = net.shape;
  if (static_cast<int>(x.size()) != s.in)
    throw StructuralError("input length does not match network");
  static thread_local std::vector<double> pre1, h;
  pre1.assign(s.hidden, 0.0);
  for (int j = 0; j < s.hidden; ++j) {
    const double* row = net.p.w1.data() + static_cast<std::size_t>(j) * s.in;
    double acc = net.p.b1[j];
    for (int i = 0; i < s.in; ++i) acc += row[i] * x[i];
    pre1[j] = acc;
  }
  h.resize(s.hidden);
  for (int j = 0; j < s.hidden; ++j) h[j] = pre1[j] > 0.0 ? pre1[j] : 0.0;
  out.assign(s.out, 0.0);
  for (int o = 0; o < s.out; ++o) {
    const double* row = net.p.w2.data() + static_cast<std::size_t>(o) * s.hidden;
    double acc = net.p.b2[o];
    for (int j = 0; j < s.hidden; ++j) acc += row[j] * h[j];
    out[o] = acc;
  }
  if (cache) {
    cache->x.assign(x.begin(), x.end());
    cache->pre1 = pre1;
    cache->h = h;
  }
}

void softmax(std::span<const double> logits, std::vector<double>& probs) {
  if (logits.empty()) throw StructuralError("softmax over empty logits");
  double m = logits[0];
  for (double v : logits) m = std::max(m, v);
  probs.resize(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - m);
    z += probs[i];
  }
  for (double& p : probs) p /= z;
}

void actor_probs(const Mlp& net, std::span<const double> x,
                 std::vector<double>& probs, ForwardCache* cache) {
  static thread_local std::vector<double> logits;
  forward(net, x, logits, cache);
  softmax(logits, probs);
}

double safe_log(double p) { return std::log(std::max(p, 1e-12)); }

void backprop(const Mlp& net, const ForwardCache& cache,
              std::span<const double> upstream, Tensors& grads) {
  const MlpShape& s = net.shape;
  if (static_cast<int>(upstream.size()) != s.out)
    throw StructuralError("upstream length does not match network");
  static thread_local std::vector<double> dh;
  dh.assign(s.hidden, 0.0);
  for (int o = 0; o < s.out; ++o) {
    double u = upstream[o];
    if (u == 0.0) continue;
    grads.b2[o] += u;
    double* gw2 = grads.w2.data() + static_cast<std::size_t>(o) * s.hidden;
    const double* w2 = net.p.w2.data() + static_cast<std::size_t>(o) * s.hidden;
    for (int j = 0; j < s.hidden; ++j) {
      gw2[j] += u * cache.h[j];
      dh[j] += u * w2[j];
    }
  }
  for (int j = 0; j < s.hidden; ++j) {
    if (cache.pre1[j] <= 0.0 || dh[j] == 0.0) continue;
    double d = dh[j];
    grads.b1[j] += d;
    double* gw1 = grads.w1.data() + static_cast<std::size_t>(j) * s.in;
    for (int i = 0; i < s.in; ++i) gw1[i] += d * cache.x[i];
  }
}

namespace {

void adam_one(std::vector<double>& p, const std::vector<double>& g,
              std::vector<double>& m, std::vector<double>& v,
              const AdamConfig& c, double bc1, double bc2, double sign) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
    double mhat = m[i] / bc1;
    double vhat = v[i] / bc2;
    p[i] += sign * c.lr * mhat / (std::sqrt(vhat) + c.eps);
  }
}

}  // namespace

void adam_step(Tensors& params, const Tensors& grads, AdamState& st, bool maximize) {
  if (params.count() != grads.count())
    throw StructuralError("gradient layout does not match parameters");
  st.step += 1;
  double bc1 = 1.0 - std::pow(st.cfg.beta1, st.step);
  double bc2 = 1.0 - std::pow(st.cfg.beta2, st.step);
  double sign = maximize ? 1.0 : -1.0;
  adam_one(params.w1, grads.w1, st.m.w1, st.v.w1, st.cfg, bc1, bc2, sign);
  adam_one(params.b1, grads.b1, st.m.b1, st.v.b1, st.cfg, bc1, bc2, sign);
  adam_one(params.w2, grads.w2, st.m.w2, st.v.w2, st.cfg, bc1, bc2, sign);
  adam_one(params.b2, grads.b2, st.m.b2, st.v.b2, st.cfg, bc1, bc2, sign);
}

namespace {

constexpr char kCkptMagic[8] = {'A', 'O', 'S', 'C', 'K', 'P', 'T', '1'};

void append_doubles(std::string& buf, const std::vector<double>& v) {
  std::size_t off = buf.size();
  buf.resize(off + v.size() * sizeof(double));
  std::memcpy(buf.data() + off, v.data(), v.size() * sizeof(double));
}

void take_doubles(const std::string& buf, std::size_t& off, std::vector<double>& v) {
  std::size_t bytes = v.size() * sizeof(double);
  if (off + bytes > buf.size()) throw IoError("checkpoint payload truncated");
  std::memcpy(v.data(), buf.data() + off, bytes);
  off += bytes;
}

}  // namespace

void save_checkpoint(const Mlp& net, const std::string& kind, std::uint64_t seed,
                     long step, const std::string& path) {
  nlohmann::json hdr;
  hdr["format"] = "aos-mlp-1";
  hdr["kind"] = kind;
  hdr["in"] = net.shape.in;
  hdr["hidden"] = net.shape.hidden;
  hdr["out"] = net.shape.out;
  hdr["seed"] = seed;
  hdr["step"] = step;
  std::string hs = hdr.dump();

  std::string buf;
  buf.append(kCkptMagic, sizeof(kCkptMagic));
  std::uint32_t hlen = static_cast<std::uint32_t>(hs.size());
  buf.append(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  buf.append(hs);
  append_doubles(buf, net.p.w1);
  append_doubles(buf, net.p.b1);
  append_doubles(buf, net.p.w2);
  append_doubles(buf, net.p.b2);
  std::uint64_t sum = fnv1a64(buf.data(), buf.size());
  buf.append(reinterpret_cast<const char*>(&sum), sizeof(sum));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("short write on checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < sizeof(kCkptMagic) + sizeof(std::uint32_t) + sizeof(std::uint64_t))
    throw IoError("checkpoint too short: " + path);
  if (std::memcmp(buf.data(), kCkptMagic, sizeof(kCkptMagic)) != 0)
    throw IoError("bad checkpoint magic: " + path);

  std::uint64_t stored;
  std::memcpy(&stored, buf.data() + buf.size() - sizeof(stored), sizeof(stored));
  std::uint64_t actual = fnv1a64(buf.data(), buf.size() - sizeof(stored));
  if (stored != actual) throw IoError("checkpoint checksum mismatch: " + path);

  std::size_t off = sizeof(kCkptMagic);
  std::uint32_t hlen;
  std::memcpy(&hlen, buf.data() + off, sizeof(hlen));
  off += sizeof(hlen);
  if (off + hlen > buf.size() - sizeof(stored))
    throw IoError("checkpoint header overruns file: " + path);
  nlohmann::json hdr;
  try {
    hdr = nlohmann::json::parse(buf.substr(off, hlen));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad checkpoint header: ") + e.what());
  }
  off += hlen;
  if (hdr.value("format", "") != std::string("aos-mlp-1"))
    throw IoError("unsupported checkpoint format: " + path);

  Checkpoint ck;
  ck.kind = hdr.value("kind", "");
  ck.seed = hdr.value("seed", 0ULL);
  ck.step = hdr.value("step", 0L);
  MlpShape s{hdr.at("in").get<int>(), hdr.at("hidden").get<int>(),
             hdr.at("out").get<int>()};
  ck.net.shape = s;
  ck.net.p = Tensors::zeros(s);
  take_doubles(buf, off, ck.net.p.w1);
  take_doubles(buf, off, ck.net.p.b1);
  take_doubles(buf, off, ck.net.p.w2);
  take_doubles(buf, off, ck.net.p.b2);
  if (off != buf.size() - sizeof(stored))
    throw IoError("checkpoint has trailing bytes: " + path);
  return ck;
}

}  // namespace aos
