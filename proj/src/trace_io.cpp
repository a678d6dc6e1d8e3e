#include "prbslice/trace_io.hpp"

#include <sstream>

#include "prbslice/config_io.hpp"

namespace prbslice {

using nlohmann::json;

const std::vector<std::string> kTraceCsvColumns = {"j",  "slice_id", "partition_id", "usr",    "shr",
                                                   "usg", "resi",    "E",            "en",     "lv",
                                                   "top", "ramp",    "pt_shr",       "rp_shr", "rp_ovr"};

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::int64_t to_int(const std::string& cell, int row) {
  try {
    std::size_t used = 0;
    const std::int64_t v = std::stoll(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("trace CSV row " + std::to_string(row) + ": '" + cell + "' is not an integer");
  }
}

bool to_flag(const std::string& cell, int row) {
  const std::int64_t v = to_int(cell, row);
  if (v != 0 && v != 1) throw ValidationError("trace CSV row " + std::to_string(row) + ": flag must be 0 or 1");
  return v == 1;
}

}  // namespace

std::string trace_to_csv(const AllocationTrace& trace) {
  std::ostringstream out;
  for (std::size_t c = 0; c < kTraceCsvColumns.size(); ++c) out << (c ? "," : "") << kTraceCsvColumns[c];
  out << "\n";
  for (const SystemState& s : trace.states) {
    for (int i = 1; i <= trace.config.num_slices(); ++i) {
      const SliceState& sl = s.slice(i);
      const int k = trace.config.slice(i).partition_id;
      out << s.j << ',' << i << ',' << k << ',' << sl.usr << ',' << sl.shr << ',' << sl.usg << ',' << sl.resi << ','
          << sl.entries << ',' << sl.en << ',' << sl.lv << ',' << sl.top << ',' << sl.ramp << ','
          << s.partition_share(k) << ',' << s.rp_shr << ',' << s.rp_ovr << "\n";
    }
  }
  return out.str();
}

std::vector<SystemState> states_from_csv(const std::string& text, const NetworkConfig& config) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split(line, ',') != kTraceCsvColumns) {
    throw ValidationError("trace CSV header does not match the documented column order");
  }
  std::vector<SystemState> states;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    if (cells.size() != kTraceCsvColumns.size()) {
      throw ValidationError("trace CSV row " + std::to_string(row) + ": expected " +
                            std::to_string(kTraceCsvColumns.size()) + " columns");
    }
    const int j = static_cast<int>(to_int(cells[0], row));
    const int i = static_cast<int>(to_int(cells[1], row));
    const int k = static_cast<int>(to_int(cells[2], row));
    if (i < 1 || i > config.num_slices() || config.slice(i).partition_id != k) {
      throw ValidationError("trace CSV row " + std::to_string(row) + ": slice/partition ids do not match the config");
    }
    if (states.empty() || states.back().j != j) {
      if (!states.empty() && j != states.back().j + 1) {
        throw ValidationError("trace CSV row " + std::to_string(row) + ": timesteps must be consecutive");
      }
      SystemState s;
      s.j = j;
      s.slices.resize(static_cast<std::size_t>(config.num_slices()));
      s.pt_shr.assign(static_cast<std::size_t>(config.num_partitions()), 0);
      states.push_back(std::move(s));
    }
    SystemState& s = states.back();
    SliceState& sl = s.slices[static_cast<std::size_t>(i - 1)];
    sl.usr = to_int(cells[3], row);
    sl.shr = to_int(cells[4], row);
    sl.usg = to_int(cells[5], row);
    sl.resi = to_int(cells[6], row);
    sl.entries = to_int(cells[7], row);
    sl.en = to_flag(cells[8], row);
    sl.lv = to_flag(cells[9], row);
    sl.top = to_flag(cells[10], row);
    sl.ramp = to_flag(cells[11], row);
    s.pt_shr[static_cast<std::size_t>(k - 1)] = to_int(cells[12], row);
    s.rp_shr = to_int(cells[13], row);
    s.rp_ovr = to_flag(cells[14], row);
  }
  return states;
}

json state_to_json(const SystemState& state) {
  json slices = json::array();
  for (const SliceState& sl : state.slices) {
    slices.push_back({{"usr", sl.usr},
                      {"shr", sl.shr},
                      {"usg", sl.usg},
                      {"resi", sl.resi},
                      {"E", sl.entries},
                      {"en", sl.en},
                      {"lv", sl.lv},
                      {"top", sl.top},
                      {"ramp", sl.ramp}});
  }
  return {{"j", state.j}, {"slices", slices}, {"pt_shr", state.pt_shr}, {"rp_shr", state.rp_shr},
          {"rp_ovr", state.rp_ovr}};
}

SystemState state_from_json(const json& doc) {
  SystemState s;
  try {
    s.j = doc.at("j").get<int>();
    for (const json& sl : doc.at("slices")) {
      SliceState x;
      x.usr = sl.at("usr").get<std::int64_t>();
      x.shr = sl.at("shr").get<std::int64_t>();
      x.usg = sl.at("usg").get<std::int64_t>();
      x.resi = sl.at("resi").get<std::int64_t>();
      x.entries = sl.at("E").get<std::int64_t>();
      x.en = sl.at("en").get<bool>();
      x.lv = sl.at("lv").get<bool>();
      x.top = sl.at("top").get<bool>();
      x.ramp = sl.at("ramp").get<bool>();
      s.slices.push_back(x);
    }
    s.pt_shr = doc.at("pt_shr").get<std::vector<std::int64_t>>();
    s.rp_shr = doc.at("rp_shr").get<std::int64_t>();
    s.rp_ovr = doc.at("rp_ovr").get<bool>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad state document: ") + e.what());
  }
  return s;
}

json trace_to_json(const AllocationTrace& trace) {
  json states = json::array();
  for (const SystemState& s : trace.states) states.push_back(state_to_json(s));
  return {{"config", config_to_json(trace.config)}, {"scenario", scenario_to_json(trace.scenario)}, {"states", states}};
}

AllocationTrace trace_from_json(const json& doc) {
  AllocationTrace trace;
  trace.config = config_from_json(doc.at("config"));
  trace.scenario = scenario_from_json(doc.at("scenario"));
  for (const json& s : doc.at("states")) trace.states.push_back(state_from_json(s));
  return trace;
}

std::vector<TraceDifference> diff_states(const std::vector<SystemState>& left, const std::vector<SystemState>& right) {
  std::vector<TraceDifference> out;
  if (left.size() != right.size()) {
    out.push_back({0, "length", std::to_string(left.size()), std::to_string(right.size())});
  }
  const std::size_t n = std::min(left.size(), right.size());
  for (std::size_t t = 0; t < n; ++t) {
    const SystemState& a = left[t];
    const SystemState& b = right[t];
    const int j = a.j;
    auto cmp = [&](const std::string& name, auto x, auto y) {
      if (x != y) out.push_back({j, name, std::to_string(x), std::to_string(y)});
    };
    cmp("j", a.j, b.j);
    if (a.slices.size() != b.slices.size() || a.pt_shr.size() != b.pt_shr.size()) {
      out.push_back({j, "shape", std::to_string(a.slices.size()), std::to_string(b.slices.size())});
      continue;
    }
    for (std::size_t i = 0; i < a.slices.size(); ++i) {
      const std::string sfx = "_" + std::to_string(i + 1);
      const SliceState& x = a.slices[i];
      const SliceState& y = b.slices[i];
      cmp("sl_usr" + sfx, x.usr, y.usr);
      cmp("sl_shr" + sfx, x.shr, y.shr);
      cmp("sl_usg" + sfx, x.usg, y.usg);
      cmp("sl_resi" + sfx, x.resi, y.resi);
      cmp("sl_E" + sfx, x.entries, y.entries);
      cmp("sl_en" + sfx, x.en, y.en);
      cmp("sl_lv" + sfx, x.lv, y.lv);
      cmp("sl_top" + sfx, x.top, y.top);
      cmp("sl_ramp" + sfx, x.ramp, y.ramp);
    }
    for (std::size_t k = 0; k < a.pt_shr.size(); ++k) cmp("pt_shr_" + std::to_string(k + 1), a.pt_shr[k], b.pt_shr[k]);
    cmp("rp_shr", a.rp_shr, b.rp_shr);
    cmp("rp_ovr", a.rp_ovr, b.rp_ovr);
  }
  return out;
}

std::string diff_to_csv(const std::vector<TraceDifference>& diff) {
  std::ostringstream out;
  out << "j,variable,left,right\n";
  for (const auto& d : diff) out << d.j << ',' << d.variable << ',' << d.left << ',' << d.right << "\n";
  return out.str();
}

std::vector<TraceDifference> diff_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "j,variable,left,right") {
    throw ValidationError("diff CSV header must be j,variable,left,right");
  }
  std::vector<TraceDifference> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    if (cells.size() != 4) throw ValidationError("diff CSV row " + std::to_string(row) + ": expected 4 columns");
    out.push_back({static_cast<int>(to_int(cells[0], row)), cells[1], cells[2], cells[3]});
  }
  return out;
}

}  // namespace prbslice
