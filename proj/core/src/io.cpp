#include "dmetrics/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "dmetrics/error.hpp"

namespace dmetrics {
namespace {

using nlohmann::json;

Point point_from(const json& j, const char* field) {
  if (!j.is_array() || j.empty()) {
    throw InvalidArgument(std::string("domain json: \"") + field + "\" must be a nonempty array of numbers");
  }
  Point p(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw InvalidArgument(std::string("domain json: \"") + field + "\" must contain only numbers");
    }
    p[i] = j[i].get<double>();
  }
  return p;
}

double number_from(const json& j, const char* field) {
  if (!j.is_number()) throw InvalidArgument(std::string("domain json: \"") + field + "\" must be a number");
  return j.get<double>();
}

json point_json(const Point& p) {
  json a = json::array();
  for (std::size_t i = 0; i < p.dim(); ++i) a.push_back(p[i]);
  return a;
}

class Fields {
 public:
  Fields(const json& spec, std::set<std::string> allowed) : spec_(spec) {
    allowed.insert({"kind", "n"});
    for (const auto& [key, value] : spec.items()) {
      if (!allowed.count(key)) throw InvalidArgument("domain json: unknown field \"" + key + "\"");
    }
  }
  void point(const char* name, Point& out) const {
    if (spec_.contains(name)) out = point_from(spec_.at(name), name);
  }
  void number(const char* name, double& out) const {
    if (spec_.contains(name)) out = number_from(spec_.at(name), name);
  }
  void flag(const char* name, bool& out) const {
    if (!spec_.contains(name)) return;
    if (!spec_.at(name).is_boolean()) throw InvalidArgument(std::string("domain json: \"") + name + "\" must be a boolean");
    out = spec_.at(name).get<bool>();
  }

 private:
  const json& spec_;
};

Point origin(std::size_t n) { return Point(n); }

Point unit_axis(std::size_t n, std::size_t i) {
  Point e(n);
  e[i] = 1.0;
  return e;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quoted_point(const Point& p) { return '"' + to_string(p) + '"'; }

}  // namespace

Domain domain_from_json(const json& spec) {
  if (!spec.is_object()) throw InvalidArgument("domain json: expected a JSON object");
  if (!spec.contains("kind") || !spec.at("kind").is_string()) {
    throw InvalidArgument("domain json: missing string field \"kind\"");
  }
  const DomainKind kind = parse_domain_kind(spec.at("kind").get<std::string>());
  std::size_t n = 2;
  if (spec.contains("n")) {
    if (!spec.at("n").is_number_integer() || spec.at("n").get<long long>() < 2) {
      throw InvalidArgument("domain json: \"n\" must be an integer >= 2");
    }
    n = spec.at("n").get<std::size_t>();
  }
  auto check_dim = [&](const Point& p, const char* field) {
    if (p.dim() != n) {
      throw InvalidArgument(std::string("domain json: \"") + field + "\" has dimension " +
                            std::to_string(p.dim()) + ", expected n = " + std::to_string(n));
    }
  };
  switch (kind) {
    case DomainKind::ball: {
      Fields f(spec, {"center", "radius"});
      BallParams p{origin(n), 1.0};
      f.point("center", p.center);
      f.number("radius", p.radius);
      check_dim(p.center, "center");
      return Domain::make(p);
    }
    case DomainKind::half_space: {
      Fields f(spec, {"normal", "offset", "scale"});
      HalfSpaceParams p{unit_axis(n, n - 1), 0.0, 1.0};
      f.point("normal", p.normal);
      f.number("offset", p.offset);
      f.number("scale", p.scale);
      check_dim(p.normal, "normal");
      return Domain::make(p);
    }
    case DomainKind::convex_polygon: {
      Fields f(spec, {"vertices"});
      if (n != 2) throw InvalidArgument("domain json: convex_polygon requires n = 2");
      if (!spec.contains("vertices") || !spec.at("vertices").is_array()) {
        throw InvalidArgument("domain json: convex_polygon requires a \"vertices\" array");
      }
      ConvexPolygonParams p;
      for (const auto& v : spec.at("vertices")) {
        p.vertices.push_back(point_from(v, "vertices"));
        check_dim(p.vertices.back(), "vertices");
      }
      return Domain::make(p);
    }
    case DomainKind::slit_disk: {
      Fields f(spec, {"center", "radius", "tip", "end"});
      if (n != 2) throw InvalidArgument("domain json: slit_disk requires n = 2");
      SlitDiskParams p;
      f.point("center", p.center);
      f.number("radius", p.radius);
      f.point("tip", p.tip);
      f.point("end", p.end);
      for (auto [pt, name] : {std::pair{&p.center, "center"}, {&p.tip, "tip"}, {&p.end, "end"}}) check_dim(*pt, name);
      return Domain::make(p);
    }
    case DomainKind::tangent_disk_cusp: {
      Fields f(spec, {"center", "outer_radius", "inner_radius", "direction"});
      if (n != 2) throw InvalidArgument("domain json: tangent_disk_cusp requires n = 2");
      TangentDiskCuspParams p;
      f.point("center", p.center);
      f.number("outer_radius", p.outer_radius);
      f.number("inner_radius", p.inner_radius);
      f.point("direction", p.direction);
      check_dim(p.center, "center");
      check_dim(p.direction, "direction");
      return Domain::make(p);
    }
    case DomainKind::punctured_disk: {
      Fields f(spec, {"center", "radius", "puncture", "full_plane", "scale"});
      PuncturedDiskParams p{origin(n), 1.0, origin(n), false, 1.0};
      f.point("center", p.center);
      f.number("radius", p.radius);
      f.point("puncture", p.puncture);
      f.flag("full_plane", p.full_plane);
      f.number("scale", p.scale);
      check_dim(p.center, "center");
      check_dim(p.puncture, "puncture");
      return Domain::make(p);
    }
  }
  throw InvalidArgument("domain json: unsupported kind");
}

Domain load_domain(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read domain file " + path.string());
  json spec;
  try {
    in >> spec;
  } catch (const json::parse_error& e) {
    throw InvalidArgument("domain file " + path.string() + ": " + e.what());
  }
  return domain_from_json(spec);
}

json domain_to_json(const Domain& domain) {
  json j;
  j["kind"] = std::string(to_string(domain.kind()));
  j["n"] = domain.dim();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, BallParams>) {
          j["center"] = point_json(p.center);
          j["radius"] = p.radius;
        } else if constexpr (std::is_same_v<T, HalfSpaceParams>) {
          j["normal"] = point_json(p.normal);
          j["offset"] = p.offset;
          j["scale"] = p.scale;
        } else if constexpr (std::is_same_v<T, ConvexPolygonParams>) {
          j["vertices"] = json::array();
          for (const Point& v : p.vertices) j["vertices"].push_back(point_json(v));
        } else if constexpr (std::is_same_v<T, SlitDiskParams>) {
          j["center"] = point_json(p.center);
          j["radius"] = p.radius;
          j["tip"] = point_json(p.tip);
          j["end"] = point_json(p.end);
        } else if constexpr (std::is_same_v<T, TangentDiskCuspParams>) {
          j["center"] = point_json(p.center);
          j["outer_radius"] = p.outer_radius;
          j["inner_radius"] = p.inner_radius;
          j["direction"] = point_json(p.direction);
        } else {
          j["center"] = point_json(p.center);
          j["radius"] = p.radius;
          j["puncture"] = point_json(p.puncture);
          j["full_plane"] = p.full_plane;
          j["scale"] = p.scale;
        }
      },
      domain.params());
  return j;
}

json number_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json to_json(const MetricValue& m) {
  json j;
  j["value"] = number_json(m.value);
  if (m.is_exact()) {
    j["exact"] = true;
  } else {
    j["lower"] = number_json(m.lower);
    j["upper"] = number_json(m.upper);
  }
  if (m.pseudometric) j["warning"] = "pseudometric";
  return j;
}

json to_json(const ConstantEntry& e) {
  json j;
  j["name"] = e.name;
  j["status"] = std::string(to_string(e.status));
  if (e.status != EntryStatus::skipped) {
    j["estimate"] = number_json(e.estimate);
    j["bracket"] = {number_json(e.lower), number_json(e.upper)};
    j["witness_ratio"] = number_json(e.witness_ratio);
    if (e.witness) j["witness"] = {point_json(e.witness->first), point_json(e.witness->second)};
  }
  j["sample_size"] = e.sample_size;
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

json to_json(const InequalityCheck& c) {
  json j;
  j["name"] = c.name;
  if (c.skipped) {
    j["status"] = "skipped";
    j["note"] = c.note;
    return j;
  }
  j["checked"] = c.checked;
  j["failures"] = c.failures;
  j["worst_margin"] = number_json(c.worst_margin);
  if (c.worst) j["worst_pair"] = {point_json(c.worst->first), point_json(c.worst->second)};
  json failed = json::array();
  for (const auto& [idx, margin] : c.failed_pairs) failed.push_back({{"pair", idx}, {"margin", number_json(margin)}});
  j["failed_pairs"] = failed;
  return j;
}

json to_json(const ConstantsReport& r) {
  json j;
  j["domain"] = r.domain;
  j["policy"] = r.policy;
  j["seed"] = r.seed;
  j["h"] = r.h;
  j["atlas_size"] = r.atlas_size;
  j["grid_nodes"] = r.grid_nodes;
  j["pairs"] = r.pairs;
  j["failed_pairs"] = r.failed_pairs;
  j["semantics"] =
      "estimates are sample suprema over quasihyperbolic witness arcs: lower estimates of the best "
      "constants; brackets combine numerator upper and denominator lower bounds";
  j["constants"] = json::array();
  for (const auto& e : r.constants) j["constants"].push_back(to_json(e));
  if (!r.inequalities.empty()) {
    j["inequalities"] = json::array();
    for (const auto& c : r.inequalities) j["inequalities"].push_back(to_json(c));
  }
  return j;
}

json to_json(const ChainDiagnostics& c) {
  auto chain = [](const DyadicChain& ch) {
    json a = json::array();
    for (std::size_t i = 0; i < ch.points.size(); ++i) {
      a.push_back({{"point", point_json(ch.points[i])}, {"depth", number_json(ch.depths[i])}});
    }
    return a;
  };
  json j;
  j["apex_vertex"] = c.chains.apex;
  j["m"] = c.chains.from_start.doublings();
  j["s"] = c.chains.from_end.doublings();
  j["start_chain"] = chain(c.chains.from_start);
  j["end_chain"] = chain(c.chains.from_end);
  j["links"] = json::array();
  for (const auto& l : c.links) {
    j["links"].push_back({{"index", l.index},
                          {"b1", number_json(l.b1)},
                          {"b2", number_json(l.b2)},
                          {"b3", number_json(l.b3)},
                          {"rho", to_json(l.rho)}});
  }
  j["b1"] = number_json(c.b1);
  j["b2"] = number_json(c.b2);
  j["b3"] = number_json(c.b3);
  j["finite"] = c.finite();
  return j;
}

void write_pairs_csv(std::ostream& os, const std::vector<PairEvaluation>& evals) {
  os << "x,y,j,jprime_lo,jprime_hi,alpha_lo,alpha_hi,k,alphatilde,lambda,rho_lo,rho_hi\n";
  for (const auto& ev : evals) {
    auto opt = [&](bool have, double v) { return have && ev.ok() ? fmt(v) : std::string(); };
    os << quoted_point(ev.x) << ',' << quoted_point(ev.y) << ',' << fmt(ev.j.value) << ','
       << opt(ev.has_rho, ev.jprime.lower) << ',' << opt(ev.has_rho, ev.jprime.upper) << ','
       << fmt(ev.alpha.lower) << ',' << fmt(ev.alpha.upper) << ',' << opt(true, ev.k.value) << ','
       << opt(ev.has_alphatilde, ev.alphatilde.value) << ',' << opt(ev.has_lambda, ev.lambda.value) << ','
       << opt(ev.has_rho, ev.rho.lower) << ',' << opt(ev.has_rho, ev.rho.upper) << '\n';
  }
}

}  // namespace dmetrics
