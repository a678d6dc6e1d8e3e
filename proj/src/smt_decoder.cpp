#include "prbslice/smt_decoder.hpp"

#include "prbslice/smt_encoder.hpp"

namespace prbslice {

namespace {

namespace n = smt_names;

class Reader {
 public:
  explicit Reader(const Model& model) : model_(model) {}

  std::int64_t integer(const std::string& name) const {
    const ModelValue& v = find(name);
    if (!std::holds_alternative<std::int64_t>(v)) throw DecodeError("model value of " + name + " is not an integer");
    return std::get<std::int64_t>(v);
  }
  bool boolean(const std::string& name) const {
    const ModelValue& v = find(name);
    if (!std::holds_alternative<bool>(v)) throw DecodeError("model value of " + name + " is not a boolean");
    return std::get<bool>(v);
  }

 private:
  const ModelValue& find(const std::string& name) const {
    auto it = model_.find(name);
    if (it == model_.end()) throw DecodeError("model has no value for " + name);
    return it->second;
  }
  const Model& model_;
};

}  // namespace

AllocationTrace extract_trace(const SolverVerdict& verdict, const NetworkConfig& config,
                              const ScenarioTrace& scenario) {
  if (verdict.status != SolverStatus::sat || !verdict.model) {
    throw DecodeError(std::string("cannot decode a trace from a '") + to_string(verdict.status) + "' verdict");
  }
  const Reader r(*verdict.model);
  AllocationTrace trace{config, scenario, {}};
  for (int j = 0; j <= config.horizon; ++j) {
    SystemState s;
    s.j = j;
    for (int i = 1; i <= config.num_slices(); ++i) {
      SliceState sl;
      sl.usr = r.integer(n::usr(i, j));
      sl.shr = r.integer(n::shr(i, j));
      sl.usg = r.integer(n::usg(i, j));
      sl.resi = r.integer(n::resi(i, j));
      sl.entries = r.integer(n::entries(i, j));
      sl.en = r.boolean(n::en(i, j));
      sl.lv = r.boolean(n::lv(i, j));
      sl.top = r.boolean(n::top(i, j));
      sl.ramp = r.boolean(n::ramp(i, j));
      s.slices.push_back(sl);
    }
    for (int k = 1; k <= config.num_partitions(); ++k) s.pt_shr.push_back(r.integer(n::pt_shr(k, j)));
    s.rp_shr = r.integer(n::rp_shr(j));
    s.rp_ovr = r.boolean(n::rp_ovr(j));
    trace.states.push_back(std::move(s));
  }
  return trace;
}

}  // namespace prbslice
