#include "prbslice/config_io.hpp"

#include <fstream>
#include <sstream>

namespace prbslice {

using nlohmann::json;

namespace {

template <typename T>
T required(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(where + ": bad field '" + key + "': " + e.what());
  }
}

}  // namespace

Ratio ratio_from_json(const json& value) {
  try {
    if (value.is_string()) return Ratio::parse(value.get<std::string>());
    if (value.is_number_integer()) return Ratio(value.get<std::int64_t>(), 1);
    if (value.is_number()) return Ratio::from_double(value.get<double>());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("bad ratio: ") + e.what());
  }
  throw ValidationError("ratio must be a number or an \"a/b\" string");
}

json ratio_to_json(const Ratio& r) {
  if (r.den == 1) return r.num;
  return r.to_string();
}

NetworkConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");
  NetworkConfig cfg;
  cfg.name = doc.value("name", std::string{});

  for (const json& s : required<json>(doc, "services", "config")) {
    ServiceSpec svc;
    svc.service_id = required<int>(s, "service_id", "service");
    svc.name = s.value("name", std::string{});
    svc.priority_rank = required<int>(s, "priority_rank", "service " + std::to_string(svc.service_id));
    svc.provision = s.value("provision", false);
    cfg.services.push_back(svc);
  }
  for (const json& s : required<json>(doc, "slices", "config")) {
    SliceSpec sl;
    sl.slice_id = required<int>(s, "slice_id", "slice");
    const std::string where = "slice " + std::to_string(sl.slice_id);
    sl.service_id = required<int>(s, "service_id", where);
    sl.partition_id = required<int>(s, "partition_id", where);
    sl.t_win = required<int>(s, "t_win", where);
    sl.m = required<int>(s, "m", where);
    cfg.slices.push_back(sl);
  }
  const json& parts = required<json>(doc, "partitions", "config");
  if (!parts.is_object()) throw ValidationError("partitions must be an object mapping id -> slice list");
  for (const auto& [key, members] : parts.items()) {
    int k = 0;
    try {
      k = std::stoi(key);
    } catch (const std::exception&) {
      throw ValidationError("partition key '" + key + "' is not an integer");
    }
    cfg.partitions[k] = members.get<std::vector<int>>();
  }
  cfg.total_prbs = required<std::int64_t>(doc, "total_prbs", "config");
  cfg.horizon = required<int>(doc, "horizon", "config");
  if (doc.contains("overuse_fraction")) cfg.overuse_fraction = ratio_from_json(doc.at("overuse_fraction"));
  if (doc.contains("timestep_minutes")) cfg.timestep_minutes = ratio_from_json(doc.at("timestep_minutes"));
  return normalized(std::move(cfg));
}

json config_to_json(const NetworkConfig& cfg) {
  json doc;
  doc["name"] = cfg.name;
  doc["services"] = json::array();
  for (const ServiceSpec& s : cfg.services) {
    doc["services"].push_back(
        {{"service_id", s.service_id}, {"name", s.name}, {"priority_rank", s.priority_rank}, {"provision", s.provision}});
  }
  doc["slices"] = json::array();
  for (const SliceSpec& s : cfg.slices) {
    doc["slices"].push_back({{"slice_id", s.slice_id},
                             {"service_id", s.service_id},
                             {"partition_id", s.partition_id},
                             {"t_win", s.t_win},
                             {"m", s.m}});
  }
  doc["partitions"] = json::object();
  for (const auto& [k, members] : cfg.partitions) doc["partitions"][std::to_string(k)] = members;
  doc["total_prbs"] = cfg.total_prbs;
  doc["horizon"] = cfg.horizon;
  doc["overuse_fraction"] = ratio_to_json(cfg.overuse_fraction);
  doc["timestep_minutes"] = ratio_to_json(cfg.timestep_minutes);
  return doc;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

NetworkConfig load_config(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

}  // namespace prbslice
