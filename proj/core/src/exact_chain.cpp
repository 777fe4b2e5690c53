#include "evoset/exact_chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>

#include "evoset/env_io.hpp"
#include "evoset/error.hpp"
#include "evoset/isoperimetry.hpp"
#include "evoset/monotonicity.hpp"

namespace evoset {

template <class Real>
StepKernel<Real> one_step_kernel(const DynEnv& env, Time t) {
  env.check_time(t);
  using Traits = ScalarTraits<Real>;
  const double time = static_cast<double>(t);
  const std::size_t n = env.num_vertices();
  StepKernel<Real> k;
  k.offset.reserve(n + 1);
  k.offset.push_back(0);
  k.in_support.assign(n, false);
  for (Vertex x = 0; x < n; ++x) {
    Real pi_x(0);
    const std::size_t first = k.target.size();
    for (const auto& inc : env.incident(x)) {
      const double w = env.weight(inc.edge, time);
      if (w > 0.0) {
        k.target.push_back(inc.neighbor);
        k.prob.push_back(Traits::from_double(w));
        pi_x += k.prob.back();
      }
    }
    if (pi_x > 0) {
      k.in_support[x] = true;
      for (std::size_t i = first; i < k.prob.size(); ++i) k.prob[i] /= pi_x;
    }
    k.offset.push_back(k.target.size());
  }
  return k;
}

template <class Real>
void advance(KernelSlice<Real>& slice, const DynEnv& env) {
  const Time t = slice.t();
  if (t + 1 > env.horizon()) env.check_time(t + 1);
  const StepKernel<Real> step = one_step_kernel<Real>(env, t);
  const std::size_t n = slice.size();
  std::vector<Real> next(n * n, Real(0));
  const auto& cur = slice.data();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t z = 0; z < n; ++z) {
      const Real& a = cur[x * n + z];
      if (a == 0) continue;
      if (!step.in_support[z]) {
        fail(ErrorCode::kInvalidState, "walk mass on vertex " + env.label(static_cast<Vertex>(z)) +
                                           " outside V_" + std::to_string(t));
      }
      for (std::size_t i = step.offset[z]; i < step.offset[z + 1]; ++i) {
        next[x * n + step.target[i]] += a * step.prob[i];
      }
    }
  }
  slice.data() = std::move(next);
  slice.set_t(t + 1);
}

template <class Real>
KernelSlice<Real> multi_step_kernel(const DynEnv& env, Time s, Time t) {
  env.check_time(s);
  env.check_time(t);
  if (s > t) fail(ErrorCode::kInvalidArgument, "multi_step_kernel needs s <= t");
  const std::size_t n = env.num_vertices();
  if (n > kMaxKernelVertices) {
    fail(ErrorCode::kCapExceeded, "dense kernel over " + std::to_string(n) + " vertices (cap " +
                                      std::to_string(kMaxKernelVertices) + ")");
  }
  KernelSlice<Real> slice(s, s, n);
  const auto pi = env.vertex_conductances(s);
  for (Vertex x = 0; x < n; ++x) {
    if (pi[x] > 0.0) slice(x, x) = Real(1);
  }
  while (slice.t() < t) advance(slice, env);
  return slice;
}

template StepKernel<double> one_step_kernel<double>(const DynEnv&, Time);
template StepKernel<Rational> one_step_kernel<Rational>(const DynEnv&, Time);
template void advance<double>(KernelSlice<double>&, const DynEnv&);
template void advance<Rational>(KernelSlice<Rational>&, const DynEnv&);
template KernelSlice<double> multi_step_kernel<double>(const DynEnv&, Time, Time);
template KernelSlice<Rational> multi_step_kernel<Rational>(const DynEnv&, Time, Time);

double heat_kernel(const DynEnv& env, const KernelSlice<double>& slice, Vertex x, Vertex y) {
  env.check_vertex(x);
  env.check_vertex(y);
  if (!env.in_support(slice.s(), x)) {
    fail(ErrorCode::kInvalidState, "x = " + env.label(x) + " not in V_" + std::to_string(slice.s()));
  }
  const double pi_y = env.vertex_conductance(slice.t(), y);
  if (!(pi_y > 0.0)) {
    fail(ErrorCode::kInvalidState, "y = " + env.label(y) + " not in V_" + std::to_string(slice.t()));
  }
  return slice(x, y) / pi_y;
}

double heat_kernel(const DynEnv& env, Time s, Vertex x, Time t, Vertex y) {
  return heat_kernel(env, multi_step_kernel<double>(env, s, t), x, y);
}

std::vector<EnvelopePoint> decay_envelope(const DynEnv& env, Time s, Time t_end,
                                          IsoperimetricProfile& profile) {
  if (!profile.monotonicity().is_effectively_nondecreasing) {
    fail(ErrorCode::kNonMonotone, "decay envelope needs effectively non-decreasing conductances");
  }
  const double d = profile.config().d;
  const LatticeInfo* info = env.lattice();
  auto counts = [&](Vertex v) { return info == nullptr || !info->exterior || v != *info->exterior; };

  KernelSlice<double> slice = multi_step_kernel<double>(env, s, s);
  const auto pi_s = env.vertex_conductances(s);
  const double psi_s = profile.psi(s, false);
  std::vector<EnvelopePoint> out;
  double running = 0.0;
  while (slice.t() < t_end) {
    advance(slice, env);
    const Time t = slice.t();
    const auto pi_t = env.vertex_conductances(t);
    double sup = 0.0;
    for (Vertex x = 0; x < slice.size(); ++x) {
      if (!(pi_s[x] > 0.0) || !counts(x)) continue;
      const auto row = slice.row(x);
      for (Vertex y = 0; y < slice.size(); ++y) {
        if (!(pi_t[y] > 0.0) || !counts(y)) continue;
        sup = std::max(sup, pi_s[x] * row[y] / pi_t[y]);
      }
    }
    EnvelopePoint p;
    p.t = t;
    p.psi_gap = profile.psi(t, false) - psi_s;
    p.sup_scaled = sup;
    p.value = sup * std::pow(std::exp(1.0) + p.psi_gap, d / 2.0);
    running = std::max(running, p.value);
    p.running_max = running;
    out.push_back(p);
  }
  return out;
}

void write_kernel_csv(std::ostream& out, const DynEnv& env, const KernelSlice<double>& slice, bool header) {
  if (header) out << "s,t,x,y,prob\n";
  const auto old_precision = out.precision(17);
  for (Vertex x = 0; x < slice.size(); ++x) {
    for (Vertex y = 0; y < slice.size(); ++y) {
      const double p = slice(x, y);
      if (p != 0.0) {
        out << slice.s() << ',' << slice.t() << ',' << env.label(x) << ',' << env.label(y) << ',' << p << '\n';
      }
    }
  }
  out.precision(old_precision);
}

namespace {

constexpr char kCacheMagic[8] = {'E', 'V', 'K', 'C', 'A', 'C', 'H', '1'};

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(std::istream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof v));
}

}  // namespace

KernelCache::KernelCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path KernelCache::path_for(const std::string& digest, Time s, Time t) const {
  return dir_ / (digest + "_" + std::to_string(s) + "_" + std::to_string(t) + ".evk");
}

std::optional<KernelSlice<double>> KernelCache::load(const DynEnv& env, Time s, Time t) const {
  const std::string digest = env_digest(env);
  std::ifstream in(path_for(digest, s, t), std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  char stored_digest[64];
  Time fs = 0, ft = 0;
  std::uint64_t n = 0;
  if (!in.read(magic, 8) || std::memcmp(magic, kCacheMagic, 8) != 0) return std::nullopt;
  if (!in.read(stored_digest, 64) || std::string(stored_digest, 64) != digest) return std::nullopt;
  if (!get(in, fs) || !get(in, ft) || !get(in, n)) return std::nullopt;
  if (fs != s || ft != t || n != env.num_vertices()) return std::nullopt;
  KernelSlice<double> slice(s, t, n);
  auto& data = slice.data();
  if (!in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)))) {
    return std::nullopt;
  }
  return slice;
}

void KernelCache::store(const DynEnv& env, const KernelSlice<double>& slice) const {
  std::filesystem::create_directories(dir_);
  const std::string digest = env_digest(env);
  std::ofstream out(path_for(digest, slice.s(), slice.t()), std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write kernel cache in " + dir_.string());
  out.write(kCacheMagic, 8);
  out.write(digest.data(), 64);
  put(out, slice.s());
  put(out, slice.t());
  put(out, static_cast<std::uint64_t>(slice.size()));
  out.write(reinterpret_cast<const char*>(slice.data().data()),
            static_cast<std::streamsize>(slice.data().size() * sizeof(double)));
}

}  // namespace evoset
