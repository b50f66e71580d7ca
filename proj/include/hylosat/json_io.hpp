// ============================================================================
// hylosat/json_io.hpp — JSON file formats
// ============================================================================
//
// Model files:
//   {"kind":"finite","states":3,"nominals":{"i":1},"svars":{"x":0}}
//     (optional "props":{"p":[0,2]} for proposition valuations)
//   {"kind":"segmented","segments":[{"type":"point","nominals":["i"]},
//                                   {"type":"dense"}, ...]}
//
// ORD instances:
//   {"vertices":["a","b"],"successor":[["a","b"]],"s":"a","t":"b"}
//
// Verdicts:
//   {"verdict":"sat","route":"...","frame":"nat","witness":{...}}
//
// ============================================================================

#pragma once

#include <string>

#include <json.hpp>

#include "hylosat/deciders.hpp"
#include "hylosat/kripke.hpp"
#include "hylosat/reductions.hpp"

namespace hylosat {

using nlohmann::json;

// ── models ──────────────────────────────────────────────────────────────────

inline json to_json(const FiniteLinearModel& m) {
  json j;
  j["kind"] = "finite";
  j["states"] = m.size;
  j["nominals"] = json::object();
  for (const auto& [name, s] : m.nominals) j["nominals"][name] = s;
  j["svars"] = json::object();
  for (const auto& [name, s] : m.svars) j["svars"][name] = s;
  if (!m.props.empty()) {
    j["props"] = json::object();
    for (const auto& [name, ss] : m.props) j["props"][name] = ss;
  }
  return j;
}

inline json to_json(const SegmentedLinearModel& m) {
  json j;
  j["kind"] = "segmented";
  j["segments"] = json::array();
  for (const Segment& s : m.segments) {
    json seg;
    if (s.dense) {
      seg["type"] = "dense";
    } else {
      seg["type"] = "point";
      seg["nominals"] = s.nominals;
    }
    j["segments"].push_back(std::move(seg));
  }
  return j;
}

struct ParsedModel {
  bool segmented = false;
  FiniteLinearModel finite;
  SegmentedLinearModel seg;
};

inline ParsedModel model_from_json(const json& j) {
  try {
    ParsedModel out;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "finite") {
      out.finite.size = j.at("states").get<int>();
      if (j.contains("nominals"))
        for (const auto& [name, s] : j.at("nominals").items())
          out.finite.nominals[name] = s.get<int>();
      if (j.contains("svars"))
        for (const auto& [name, s] : j.at("svars").items())
          out.finite.svars[name] = s.get<int>();
      if (j.contains("props"))
        for (const auto& [name, ss] : j.at("props").items())
          for (const auto& s : ss) out.finite.props[name].insert(s.get<int>());
      out.finite.validate();
      return out;
    }
    if (kind == "segmented") {
      out.segmented = true;
      std::vector<Segment> segs;
      for (const auto& sj : j.at("segments")) {
        std::string type = sj.at("type").get<std::string>();
        Segment s;
        if (type == "dense") {
          s.dense = true;
        } else if (type == "point") {
          if (sj.contains("nominals"))
            for (const auto& n : sj.at("nominals")) s.nominals.insert(n.get<std::string>());
        } else {
          throw ModelError("unknown segment type '" + type + "'");
        }
        segs.push_back(std::move(s));
      }
      out.seg = SegmentedLinearModel::make(std::move(segs));
      return out;
    }
    throw ModelError("unknown model kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed model file: ") + e.what());
  }
}

// ── ORD instances ───────────────────────────────────────────────────────────

inline OrdInstance ord_from_json(const json& j) {
  try {
    OrdInstance o;
    for (const auto& v : j.at("vertices")) o.vertices.push_back(v.get<std::string>());
    for (const auto& e : j.at("successor"))
      o.successor.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    o.s = j.at("s").get<std::string>();
    o.t = j.at("t").get<std::string>();
    o.validate();
    return o;
  } catch (const json::exception& e) {
    throw FragmentError(std::string("malformed ORD instance: ") + e.what());
  }
}

// ── verdicts ────────────────────────────────────────────────────────────────

inline json to_json(const Verdict& v) {
  json j;
  j["verdict"] = to_string(v.result);
  j["route"] = to_string(v.route);
  j["frame"] = to_string(v.frame);
  if (v.witness) {
    const Witness& w = *v.witness;
    json wj;
    wj["assignment"] = json::object();
    for (const auto& [name, s] : w.assignment) wj["assignment"][name] = s;
    wj["valuation"] = json::object();
    for (const auto& [name, s] : w.valuation) wj["valuation"][name] = s;
    switch (w.kind) {
      case Witness::Kind::Nat: wj["model"] = json{{"kind", "nat"}}; break;
      case Witness::Kind::Finite: wj["model"] = to_json(w.finite); break;
      case Witness::Kind::Segmented: wj["model"] = to_json(w.segmented); break;
    }
    wj["state"] = w.state;
    wj["formula"] = print(w.checked);
    j["witness"] = std::move(wj);
  }
  return j;
}

// ── quotient results ────────────────────────────────────────────────────────

inline json to_json(const QuotientResult& q) {
  json j;
  j["quotient"] = to_json(q.quotient);
  j["class_map"] = q.class_map;
  j["class_sizes"] = q.class_sizes;
  json deltas = json::array();
  for (const DeltaInfo& d : q.delta) {
    if (d.nominal_state) deltas.push_back(nullptr);
    else deltas.push_back(d.value);
  }
  j["delta"] = std::move(deltas);
  return j;
}

}  // namespace hylosat
