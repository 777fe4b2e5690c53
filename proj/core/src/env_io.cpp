#include "evoset/env_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "evoset/error.hpp"
#include "evoset/rng.hpp"
#include "json.hpp"

namespace evoset {

using nlohmann::json;

namespace {

std::string label_of(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  fail(ErrorCode::kConfig, "vertex ids must be strings or integers");
}

template <class T>
T field_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::kConfig, std::string("field '") + key + "' has the wrong type");
  }
}

Boundary parse_boundary(const std::string& s) {
  if (s == "free") return Boundary::kFree;
  if (s == "wired") return Boundary::kWired;
  fail(ErrorCode::kConfig, "field 'boundary' must be free or wired, got '" + s + "'");
}

DynEnv graph_from_json(const json& doc) {
  EnvBuilder b;
  const auto& vertices = doc.at("vertices");
  if (vertices.is_number_integer()) {
    const auto n = vertices.get<long long>();
    if (n <= 0) fail(ErrorCode::kConfig, "field 'vertices' must be positive");
    b.add_vertices(static_cast<std::size_t>(n));
  } else {
    for (const auto& v : vertices) b.add_vertex(label_of(v));
  }
  std::map<std::string, Vertex> index;
  for (Vertex v = 0; v < b.num_vertices(); ++v) {
    std::string label = vertices.is_number_integer() ? std::to_string(v) : label_of(vertices[v]);
    if (!index.emplace(label, v).second) fail(ErrorCode::kConfig, "duplicate vertex id " + label);
  }
  auto lookup = [&](const json& j) {
    auto it = index.find(label_of(j));
    if (it == index.end()) fail(ErrorCode::kUnknownVertex, "edge endpoint " + label_of(j));
    return it->second;
  };
  b.set_horizon(doc.at("horizon").get<Time>());
  for (const auto& e : doc.at("edges")) {
    const EdgeId id = b.add_edge(lookup(e.at("u")), lookup(e.at("v")), e.at("weight").get<double>());
    if (auto it = e.find("changes"); it != e.end()) {
      for (const auto& change : *it) {
        b.add_change(id, change.at(0).get<double>(), change.at(1).get<double>());
      }
    }
  }
  if (auto it = doc.find("lattice"); it != doc.end()) {
    LatticeInfo info;
    info.dim = it->at("dim").get<int>();
    info.lo = it->at("lo").get<int>();
    info.hi = it->at("hi").get<int>();
    info.boundary = parse_boundary(it->at("boundary").get<std::string>());
    info.coords = it->at("coords").get<std::vector<std::int32_t>>();
    if (auto ext = it->find("exterior"); ext != it->end() && !ext->is_null()) {
      info.exterior = ext->get<Vertex>();
    }
    if (auto org = it->find("origin"); org != it->end() && !org->is_null()) {
      info.origin = org->get<Vertex>();
    }
    b.set_lattice(std::move(info));
  }
  return b.build();
}

DynEnv generator_from_json(const json& doc) {
  const auto kind = doc.at("generator").get<std::string>();
  const Time horizon = field_or<Time>(doc, "horizon", 16);
  if (kind == "e2") return e2_env(horizon, field_or<double>(doc, "factor_at_1", 1.0));
  if (kind == "e3") return e3_env(horizon);
  if (kind == "zd_box") {
    BoxSpec spec;
    if (!doc.contains("d")) fail(ErrorCode::kConfig, "zd_box generator requires field 'd'");
    if (!doc.contains("L")) fail(ErrorCode::kConfig, "zd_box generator requires field 'L'");
    spec.dim = doc.at("d").get<int>();
    spec.side = doc.at("L").get<int>();
    spec.boundary = parse_boundary(field_or<std::string>(doc, "boundary", "free"));
    spec.weight_min = field_or<double>(doc, "weight_min", 1.0);
    spec.weight_max = field_or<double>(doc, "weight_max", spec.weight_min);
    spec.loop_weight = field_or<double>(doc, "loop_weight", -1.0);
    spec.changes = field_or<int>(doc, "changes", 0);
    spec.change_horizon = field_or<Time>(doc, "change_horizon", horizon);
    spec.horizon = horizon;
    spec.seed = field_or<std::uint64_t>(doc, "seed", 1);
    return zd_box(spec);
  }
  fail(ErrorCode::kConfig, "unknown generator '" + kind + "'");
}

std::string hexfloat(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

}  // namespace

DynEnv parse_env_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kConfig, std::string("environment document: ") + e.what());
  }
  try {
    if (doc.contains("generator")) return generator_from_json(doc);
    return graph_from_json(doc);
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, std::string("environment document: ") + e.what());
  }
}

DynEnv load_env_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_env_document(ss.str());
}

std::string env_document(const DynEnv& env) {
  json doc;
  json vertices = json::array();
  for (Vertex v = 0; v < env.num_vertices(); ++v) vertices.push_back(env.label(v));
  doc["vertices"] = std::move(vertices);
  doc["horizon"] = env.horizon();
  json edges = json::array();
  for (EdgeId e = 0; e < env.num_edges(); ++e) {
    const auto sched = env.schedule(e);
    json je{{"u", env.label(env.edge(e).u)}, {"v", env.label(env.edge(e).v)}, {"weight", sched[0].value}};
    if (sched.size() > 1) {
      json changes = json::array();
      for (std::size_t i = 1; i < sched.size(); ++i) changes.push_back({sched[i].time, sched[i].value});
      je["changes"] = std::move(changes);
    }
    edges.push_back(std::move(je));
  }
  doc["edges"] = std::move(edges);
  if (const LatticeInfo* info = env.lattice()) {
    doc["lattice"] = {{"dim", info->dim},
                      {"lo", info->lo},
                      {"hi", info->hi},
                      {"boundary", info->boundary == Boundary::kWired ? "wired" : "free"},
                      {"coords", info->coords},
                      {"exterior", info->exterior ? json(*info->exterior) : json(nullptr)},
                      {"origin", info->origin ? json(*info->origin) : json(nullptr)}};
  }
  return doc.dump();
}

std::string env_digest(const DynEnv& env) {
  std::string canon = "evoset-env-v1\n" + std::to_string(env.num_vertices()) + " " +
                      std::to_string(env.horizon()) + "\n";
  for (EdgeId e = 0; e < env.num_edges(); ++e) {
    canon += std::to_string(env.edge(e).u) + " " + std::to_string(env.edge(e).v);
    for (const ChangeEvent& c : env.schedule(e)) canon += " " + hexfloat(c.time) + ":" + hexfloat(c.value);
    canon += "\n";
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(canon.data(), canon.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::kIo, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 15]);
  }
  return out;
}

DynEnv zd_box(const BoxSpec& spec) {
  if (spec.dim < 1 || spec.side < 2) fail(ErrorCode::kInvalidArgument, "zd_box needs d >= 1, L >= 2");
  if (!(spec.weight_min > 0.0) || spec.weight_max < spec.weight_min) {
    fail(ErrorCode::kInvalidArgument, "zd_box needs 0 < weight_min <= weight_max");
  }
  std::size_t volume = 1;
  for (int i = 0; i < spec.dim; ++i) volume *= static_cast<std::size_t>(spec.side);
  Rng rng(derive_seed(spec.seed, 0x626f78, 0));

  LatticeInfo info;
  info.dim = spec.dim;
  info.lo = 0;
  info.hi = spec.side - 1;
  info.boundary = spec.boundary;
  info.coords.resize(volume * spec.dim);
  for (std::size_t v = 0; v < volume; ++v) {
    std::size_t rest = v;
    for (int i = 0; i < spec.dim; ++i) {
      info.coords[v * spec.dim + i] = static_cast<std::int32_t>(rest % spec.side);
      rest /= spec.side;
    }
  }
  {
    std::size_t origin = 0;
    std::size_t stride = 1;
    for (int i = 0; i < spec.dim; ++i, stride *= spec.side) origin += (spec.side / 2) * stride;
    info.origin = static_cast<Vertex>(origin);
  }

  // Off-diagonal edge list with initial weights; the exterior vertex, if
  // any, comes right after the lattice vertices.
  struct Pending {
    Vertex u, v;
    std::vector<ChangeEvent> sched;
  };
  std::vector<Pending> pending;
  const double mid = 0.5 * (spec.weight_min + spec.weight_max);
  auto draw_initial = [&] {
    return spec.weight_min + (mid - spec.weight_min) * uniform_open(rng);
  };
  const bool wired = spec.boundary == Boundary::kWired;
  const Vertex exterior = static_cast<Vertex>(volume);
  std::vector<double> exterior_weight(volume, 0.0);
  std::size_t stride = 1;
  for (int i = 0; i < spec.dim; ++i, stride *= spec.side) {
    for (std::size_t v = 0; v < volume; ++v) {
      const int c = info.coords[v * spec.dim + i];
      if (c + 1 < spec.side) {
        pending.push_back({static_cast<Vertex>(v), static_cast<Vertex>(v + stride), {{0.0, draw_initial()}}});
      }
      if (wired) {
        if (c == 0) exterior_weight[v] += draw_initial();
        if (c + 1 == spec.side) exterior_weight[v] += draw_initial();
      }
    }
  }
  if (wired) {
    for (std::size_t v = 0; v < volume; ++v) {
      if (exterior_weight[v] > 0.0) {
        pending.push_back({static_cast<Vertex>(v), exterior, {{0.0, exterior_weight[v]}}});
      }
    }
  }

  if (spec.changes > 0) {
    if (spec.change_horizon < 1) fail(ErrorCode::kInvalidArgument, "zd_box changes need change_horizon >= 1");
    std::vector<std::pair<Time, std::size_t>> events;
    for (int k = 0; k < spec.changes; ++k) {
      const auto t = 1 + static_cast<Time>(uniform_open(rng) * static_cast<double>(spec.change_horizon));
      const auto e = static_cast<std::size_t>(uniform_open(rng) * static_cast<double>(pending.size()));
      events.emplace_back(std::min(t, spec.change_horizon), std::min(e, pending.size() - 1));
    }
    std::sort(events.begin(), events.end());
    for (auto [t, e] : events) {
      auto& sched = pending[e].sched;
      const double current = sched.back().value;
      // Exterior edges bundle several lattice edges; scale the cap accordingly.
      const double cap = pending[e].v == exterior ? current * spec.weight_max / spec.weight_min : spec.weight_max;
      const double next = current + (std::max(cap, current) - current) * uniform_open(rng);
      if (sched.back().time == static_cast<double>(t)) {
        sched.back().value = next;
      } else {
        sched.push_back({static_cast<double>(t), next});
      }
    }
  }

  EnvBuilder b;
  b.add_vertices(volume);
  if (wired) b.add_vertex("exterior");
  const std::size_t n = b.num_vertices();
  b.set_horizon(spec.horizon);
  if (wired) info.exterior = exterior;
  b.set_lattice(info);

  std::vector<std::vector<std::size_t>> incident(n);
  std::vector<double> times{0.0};
  for (std::size_t e = 0; e < pending.size(); ++e) {
    const auto& p = pending[e];
    const EdgeId id = b.add_edge(p.u, p.v, p.sched[0].value);
    for (std::size_t i = 1; i < p.sched.size(); ++i) {
      b.add_change(id, p.sched[i].time, p.sched[i].value);
      times.push_back(p.sched[i].time);
    }
    incident[p.u].push_back(e);
    incident[p.v].push_back(e);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  auto value_at = [](const std::vector<ChangeEvent>& sched, double t) {
    double v = sched[0].value;
    for (const auto& c : sched) {
      if (c.time <= t) v = c.value;
    }
    return v;
  };
  for (Vertex x = 0; x < n; ++x) {
    const bool half = spec.loop_weight < 0.0 || x == exterior;
    if (!half) {
      b.add_edge(x, x, spec.loop_weight);
      continue;
    }
    EdgeId loop = 0;
    double previous = -1.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      double off = 0.0;
      for (std::size_t e : incident[x]) off += value_at(pending[e].sched, times[i]);
      if (i == 0) {
        loop = b.add_edge(x, x, off);
      } else if (off != previous) {
        b.add_change(loop, times[i], off);
      }
      previous = off;
    }
  }
  return b.build();
}

DynEnv e2_env(Time horizon, double factor_at_1) {
  EnvBuilder b;
  const Vertex a = b.add_vertex("a");
  const Vertex c = b.add_vertex("b");
  b.set_horizon(horizon);
  for (auto [u, v] : {std::pair{a, c}, std::pair{a, a}, std::pair{c, c}}) {
    const EdgeId e = b.add_edge(u, v, 1.0);
    if (factor_at_1 != 1.0) b.add_change(e, 1.0, factor_at_1);
  }
  return b.build();
}

DynEnv e3_env(Time horizon) {
  EnvBuilder b;
  const Vertex a = b.add_vertex("a");
  const Vertex m = b.add_vertex("b");
  const Vertex c = b.add_vertex("c");
  b.set_horizon(horizon);
  b.add_edge(a, m, 1.0);
  const EdgeId bc = b.add_edge(m, c, 1.0);
  b.add_change(bc, 1.0, 2.0);
  for (Vertex v : {a, m, c}) b.add_edge(v, v, 1.0);
  return b.build();
}

}  // namespace evoset
