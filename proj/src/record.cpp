#include "swabsim/record.hpp"

#include "json.hpp"

#include <cstdio>
#include <sstream>

namespace swabsim {

using nlohmann::json;

namespace {
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}
}  // namespace

std::uint64_t TrialSpec::derived_seed(std::uint64_t master_seed) const {
  const std::string key = label();
  return derive_seed(master_seed, key);
}

std::string TrialSpec::label() const {
  std::ostringstream os;
  os << controller << "/" << motion_name(motion) << "/" << phantom_name(phantom) << "/"
     << side_name(side) << "/" << repeat_index;
  return os.str();
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::ReachedNP: return "ReachedNP";
    case Outcome::Stuck: return "Stuck";
    case Outcome::Overload: return "Overload";
    case Outcome::Premature: return "Premature";
    case Outcome::WedgeAbort: return "WedgeAbort";
    case Outcome::Faulted: return "Faulted";
  }
  return "?";
}

const char* stage_name(StageId s) {
  switch (s) {
    case StageId::Sentry: return "Sentry";
    case StageId::Approach: return "Approach";
    case StageId::Insert: return "Insert";
    case StageId::Collect: return "Collect";
    case StageId::Extract: return "Extract";
    case StageId::Aborted: return "Aborted";
    case StageId::Done: return "Done";
  }
  return "?";
}

bool stage_transition_legal(StageId from, StageId to) {
  auto order = [](StageId s) {
    switch (s) {
      case StageId::Sentry: return 0;
      case StageId::Approach: return 1;
      case StageId::Insert: return 2;
      case StageId::Collect: return 3;
      case StageId::Extract: return 4;
      case StageId::Done: return 5;
      case StageId::Aborted: return -1;
    }
    return -2;
  };
  if (to == StageId::Aborted)
    return from == StageId::Approach || from == StageId::Insert || from == StageId::Collect;
  if (from == StageId::Aborted) return to == StageId::Extract;
  if (from == StageId::Insert && to == StageId::Done) return false;  // must pass Extract
  const int a = order(from), b = order(to);
  return a >= 0 && b > a;
}

std::optional<double> TrialRecord::stage_entry(StageId s) const {
  for (const auto& tr : transitions)
    if (tr.stage == s) return tr.t;
  return std::nullopt;
}

std::string TrialRecord::to_jsonl() const {
  json j;
  j["controller"] = spec.controller;
  j["motion"] = motion_name(spec.motion);
  j["phantom"] = phantom_name(spec.phantom);
  j["side"] = side_name(spec.side);
  j["seed"] = spec.seed;
  j["repeat"] = spec.repeat_index;
  j["outcome"] = outcome_name(outcome);
  j["reached"] = reached;
  j["np_depth"] = np_depth;
  j["fuzzy_trigger_depth"] = fuzzy_trigger_depth;
  json trs = json::array();
  for (const auto& tr : transitions) trs.push_back({{"stage", stage_name(tr.stage)}, {"t", tr.t}});
  j["transitions"] = trs;
  json evs = json::array();
  for (const auto& [t, msg] : events) evs.push_back({{"t", t}, {"event", msg}});
  j["events"] = evs;
  if (abort) {
    j["abort"] = {{"kind", abort_kind_name(abort->kind)}, {"t", abort->t},
                  {"tip_depth", abort->tip_depth}};
  }
  if (!fault.empty()) j["fault"] = fault;
  return j.dump();
}

std::string TrialRecord::series_to_csv() const {
  std::ostringstream os;
  os << "t,ee_x,ee_y,ee_z,qw,qx,qy,qz,alpha,beta,gamma,Fx,Fy,Fz,fx,fy,fz,cursor,tip_depth,stage\n";
  for (const auto& s : series) {
    os << fmt(s.t) << "," << fmt(s.ee.position.x()) << "," << fmt(s.ee.position.y()) << ","
       << fmt(s.ee.position.z()) << "," << fmt(s.ee.orientation.w()) << ","
       << fmt(s.ee.orientation.x()) << "," << fmt(s.ee.orientation.y()) << ","
       << fmt(s.ee.orientation.z()) << "," << fmt(s.head_angles.x()) << ","
       << fmt(s.head_angles.y()) << "," << fmt(s.head_angles.z()) << "," << fmt(s.force_raw.x())
       << "," << fmt(s.force_raw.y()) << "," << fmt(s.force_raw.z()) << ","
       << fmt(s.force_filtered.x()) << "," << fmt(s.force_filtered.y()) << ","
       << fmt(s.force_filtered.z()) << "," << fmt(s.cursor) << "," << fmt(s.tip_depth) << ","
       << stage_name(s.stage) << "\n";
  }
  return os.str();
}

std::string TrialRecord::to_debug_string() const {
  return to_jsonl() + "\n" + series_to_csv();
}

}  // namespace swabsim
