#include "prbslice/smt_encoder.hpp"

#include <sstream>

namespace prbslice {

namespace smt_names {

namespace {
std::string idx2(const char* stem, int a, int j) { return std::string(stem) + "_" + std::to_string(a) + "_" + std::to_string(j); }
}  // namespace

std::string usr(int i, int j) { return idx2("sl_usr", i, j); }
std::string shr(int i, int j) { return idx2("sl_shr", i, j); }
std::string usg(int i, int j) { return idx2("sl_usg", i, j); }
std::string resi(int i, int j) { return idx2("sl_resi", i, j); }
std::string resi1(int i, int j) { return idx2("sl_resi1", i, j); }
std::string entries(int i, int j) { return idx2("sl_E", i, j); }
std::string en(int i, int j) { return idx2("sl_en", i, j); }
std::string lv(int i, int j) { return idx2("sl_lv", i, j); }
std::string top(int i, int j) { return idx2("sl_top", i, j); }
std::string ramp(int i, int j) { return idx2("sl_ramp", i, j); }
std::string pt_shr(int k, int j) { return idx2("pt_shr", k, j); }
std::string rp_shr(int j) { return "rp_shr_" + std::to_string(j); }
std::string rp_ovr(int j) { return "rp_ovr_" + std::to_string(j); }
std::string ser_e(int mu, int j) { return idx2("ser_e", mu, j); }

}  // namespace smt_names

namespace {

namespace n = smt_names;

std::string lit(std::int64_t v) { return v < 0 ? "(- " + std::to_string(-v) + ")" : std::to_string(v); }

std::string app(const std::string& op, const std::vector<std::string>& args) {
  if (args.empty()) return op == "and" ? "true" : op == "or" ? "false" : "(" + op + ")";
  if (args.size() == 1 && (op == "and" || op == "or" || op == "+")) return args.front();
  std::string out = "(" + op;
  for (const auto& a : args) out += " " + a;
  return out + ")";
}
std::string app(const std::string& op, const std::string& a) { return "(" + op + " " + a + ")"; }
std::string app(const std::string& op, const std::string& a, const std::string& b) {
  return "(" + op + " " + a + " " + b + ")";
}
std::string app(const std::string& op, const std::string& a, const std::string& b, const std::string& c) {
  return "(" + op + " " + a + " " + b + " " + c + ")";
}
std::string eq(const std::string& a, const std::string& b) { return app("=", a, b); }
std::string neg(const std::string& a) { return app("not", a); }
std::string plus(const std::string& a, std::int64_t d) {
  if (d == 0) return a;
  return d > 0 ? app("+", a, lit(d)) : app("-", a, lit(-d));
}

class Builder {
 public:
  Builder(const NetworkConfig& config, const ScenarioTrace& scenario) : c_(config), s_(scenario) {}

  ConstraintSet build() {
    out_.comment = "config " + (c_.name.empty() ? std::string("(unnamed)") : c_.name) + ", N=" +
                   std::to_string(c_.num_slices()) + " K=" + std::to_string(c_.num_partitions()) +
                   " S=" + std::to_string(c_.num_services()) + " T_P=" + std::to_string(c_.total_prbs) +
                   " T=" + std::to_string(c_.horizon) + " seed=" + std::to_string(s_.seed);
    declare_step(0);
    initial();
    for (int j = 1; j <= c_.horizon; ++j) {
      declare_step(j);
      step(j);
    }
    return std::move(out_);
  }

 private:
  void declare(const std::string& name, SmtSort sort) { out_.declarations.push_back({name, sort}); }
  void assert_(const char* tag, std::string formula) { out_.assertions.push_back({tag, std::move(formula)}); }

  void declare_step(int j) {
    for (int mu = 1; mu <= c_.num_services() && j >= 1; ++mu) declare(n::ser_e(mu, j), SmtSort::Bool);
    for (int i = 1; i <= c_.num_slices(); ++i) {
      declare(n::usr(i, j), SmtSort::Int);
      declare(n::shr(i, j), SmtSort::Int);
      declare(n::usg(i, j), SmtSort::Int);
      declare(n::resi(i, j), SmtSort::Int);
      if (j >= 1) declare(n::resi1(i, j), SmtSort::Int);
      declare(n::entries(i, j), SmtSort::Int);
      declare(n::en(i, j), SmtSort::Bool);
      declare(n::lv(i, j), SmtSort::Bool);
      declare(n::top(i, j), SmtSort::Bool);
      declare(n::ramp(i, j), SmtSort::Bool);
    }
    for (int k = 1; k <= c_.num_partitions(); ++k) declare(n::pt_shr(k, j), SmtSort::Int);
    declare(n::rp_shr(j), SmtSort::Int);
    declare(n::rp_ovr(j), SmtSort::Bool);
  }

  void initial() {
    std::int64_t allocated = 0;
    for (int i = 1; i <= c_.num_slices(); ++i) {
      const std::int64_t w = c_.window_usage(i);
      allocated += w;
      assert_("initial", eq(n::usr(i, 0), "0"));
      assert_("initial", eq(n::usg(i, 0), "0"));
      assert_("initial", eq(n::shr(i, 0), lit(w)));
      assert_("initial", eq(n::resi(i, 0), lit(w)));
      assert_("initial", eq(n::entries(i, 0), "0"));
      assert_("initial", app("and", {neg(n::en(i, 0)), neg(n::lv(i, 0)), neg(n::top(i, 0)), neg(n::ramp(i, 0))}));
    }
    for (const auto& [k, members] : c_.partitions) {
      std::int64_t share = 0;
      for (int i : members) share += c_.window_usage(i);
      assert_("initial", eq(n::pt_shr(k, 0), lit(share)));
    }
    assert_("initial", eq(n::rp_shr(0), lit(c_.total_prbs - allocated)));
    assert_("initial", neg(n::rp_ovr(0)));
  }

  static bool at_boundary(int j, int t_win) { return j % t_win == 0; }

  void step(int j) {
    for (int mu = 1; mu <= c_.num_services(); ++mu) {
      assert_("scenario", s_.arrival(mu, j) ? n::ser_e(mu, j) : neg(n::ser_e(mu, j)));
    }
    for (int i = 1; i <= c_.num_slices(); ++i) {
      assert_("scenario", s_.departure(i, j) ? n::lv(i, j) : neg(n::lv(i, j)));
    }
    assert_("L3,ovr", eq(n::rp_ovr(j), app("<", n::rp_shr(j - 1), lit(c_.residual_floor()))));
    assignment(j);
    for (int i = 1; i <= c_.num_slices(); ++i) layer1(i, j);
    for (const auto& [k, members] : c_.partitions) layer2(k, members, j);
    layer3(j);
    for (int i = 1; i <= c_.num_slices(); ++i) {
      assert_("domain", app(">=", n::usr(i, j), "0"));
      assert_("domain", app(">=", n::resi(i, j), "0"));
    }
    assert_("domain", app(">=", n::rp_shr(j), "0"));
  }

  void assignment(int j) {
    for (int mu = 1; mu <= c_.num_services(); ++mu) {
      const std::vector<int> owned = c_.slices_of_service(mu);
      const std::string admitted = app("and", neg(n::rp_ovr(j)), n::ser_e(mu, j));
      if (owned.size() == 1) {
        assert_("L3,4", eq(n::en(owned.front(), j), admitted));
        continue;
      }
      for (int x : owned) {
        std::vector<std::string> terms{neg(n::rp_ovr(j)), n::ser_e(mu, j)};
        for (int y : owned) {
          if (y == x) continue;
          terms.push_back(app(y < x ? "<" : "<=", n::usr(x, j - 1), n::usr(y, j - 1)));
        }
        assert_("L3,2", eq(n::en(x, j), app("and", terms)));
      }
    }
  }

  void layer1(int i, int j) {
    const SliceSpec& sl = c_.slice(i);
    const std::int64_t w = c_.window_usage(i);
    const std::string en = n::en(i, j);
    const std::string lv = n::lv(i, j);
    const std::string join = app("and", en, neg(lv));
    const std::string leave = app("and", neg(en), lv);

    assert_("L1,1", eq(n::usr(i, j), app("ite", join, plus(n::usr(i, j - 1), 1),
                                         app("ite", leave, plus(n::usr(i, j - 1), -1), n::usr(i, j - 1)))));

    if (j % sl.t_win == 1 % sl.t_win) {
      assert_("L1,2", eq(n::entries(i, j), app("ite", en, "1", "0")));
    } else {
      assert_("L1,2", eq(n::entries(i, j), app("ite", en, plus(n::entries(i, j - 1), 1), n::entries(i, j - 1))));
    }

    const std::string grow = app("and", join, eq(app("mod", n::usr(i, j), lit(sl.m)), lit(1 % sl.m)));
    const std::string shrink = app("and", leave, eq(app("mod", n::usr(i, j), lit(sl.m)), "0"));
    assert_("L1,3", eq(n::usg(i, j), app("ite", grow, plus(n::usg(i, j - 1), 1),
                                         app("ite", shrink, plus(n::usg(i, j - 1), -1), n::usg(i, j - 1)))));
    assert_("L1,3", eq(n::resi1(i, j), app("ite", grow, plus(n::resi(i, j - 1), -1),
                                           app("ite", shrink, plus(n::resi(i, j - 1), 1), n::resi(i, j - 1)))));

    if (at_boundary(j, sl.t_win)) {
      assert_("L1,4", eq(n::top(i, j), app("and", neg(n::rp_ovr(j)), app("<=", n::resi1(i, j), lit(w)))));
      assert_("L1,5", eq(n::ramp(i, j), app("and", app(">=", app("-", n::resi1(i, j), lit(w)), lit(w)),
                                            eq(n::entries(i, j), "0"))));
    } else {
      assert_("closure", neg(n::top(i, j)));
      assert_("closure", neg(n::ramp(i, j)));
    }
    assert_("L1,6", neg(app("and", n::top(i, j), n::ramp(i, j))));
  }

  void frame_slice(int i, int j) {
    assert_("frame", eq(n::shr(i, j), n::shr(i, j - 1)));
    assert_("frame", eq(n::resi(i, j), n::resi1(i, j)));
  }

  void layer2(int k, const std::vector<int>& members, int j) {
    std::vector<int> active;
    for (int i : members) {
      if (at_boundary(j, c_.slice(i).t_win)) {
        active.push_back(i);
      } else {
        frame_slice(i, j);
      }
    }
    if (active.empty()) {
      assert_("frame", eq(n::pt_shr(k, j), n::pt_shr(k, j - 1)));
      return;
    }
    // One case per assignment of {none, top-up, ramp-down} to the boundary slices.
    std::vector<int> choice(active.size(), 0);
    for (;;) {
      std::vector<std::string> guard;
      std::vector<std::string> effect;
      std::int64_t eta1 = 0;
      std::int64_t eta2 = 0;
      for (std::size_t a = 0; a < active.size(); ++a) {
        const int i = active[a];
        const std::int64_t w = c_.window_usage(i);
        std::int64_t delta = 0;
        switch (choice[a]) {
          case 0: guard.push_back(neg(n::top(i, j))); guard.push_back(neg(n::ramp(i, j))); break;
          case 1: guard.push_back(n::top(i, j)); delta = w; eta1 += w; break;
          case 2: guard.push_back(n::ramp(i, j)); delta = -w; eta2 += w; break;
        }
        effect.push_back(eq(n::shr(i, j), plus(n::shr(i, j - 1), delta)));
        effect.push_back(eq(n::resi(i, j), plus(n::resi1(i, j), delta)));
      }
      effect.push_back(eq(n::pt_shr(k, j), plus(n::pt_shr(k, j - 1), eta1 - eta2)));
      assert_("L2", app("=>", app("and", guard), app("and", effect)));

      std::size_t a = 0;
      while (a < choice.size() && choice[a] == 2) choice[a++] = 0;
      if (a == choice.size()) break;
      ++choice[a];
    }
  }

  void layer3(int j) {
    std::vector<int> active;
    for (const auto& [k, members] : c_.partitions) {
      for (int i : members) {
        if (at_boundary(j, c_.slice(i).t_win)) {
          active.push_back(k);
          break;
        }
      }
    }
    if (active.empty()) {
      assert_("frame", eq(n::rp_shr(j), n::rp_shr(j - 1)));
      return;
    }
    // Each active partition is a top-up partition (A), a ramp-down partition (D) or unchanged.
    std::vector<int> choice(active.size(), 0);
    for (;;) {
      std::vector<std::string> guard;
      std::vector<std::string> zeta1;
      std::vector<std::string> zeta2;
      for (std::size_t a = 0; a < active.size(); ++a) {
        const std::string now = n::pt_shr(active[a], j);
        const std::string before = n::pt_shr(active[a], j - 1);
        switch (choice[a]) {
          case 0: guard.push_back(eq(now, before)); break;
          case 1: guard.push_back(app(">", now, before)); zeta1.push_back(app("-", now, before)); break;
          case 2: guard.push_back(app("<", now, before)); zeta2.push_back(app("-", before, now)); break;
        }
      }
      std::string rp = n::rp_shr(j - 1);
      if (!zeta1.empty()) rp = app("-", rp, app("+", zeta1));
      if (!zeta2.empty()) rp = app("+", rp, app("+", zeta2));
      assert_("L3,1", app("=>", app("and", guard), eq(n::rp_shr(j), rp)));

      std::size_t a = 0;
      while (a < choice.size() && choice[a] == 2) choice[a++] = 0;
      if (a == choice.size()) break;
      ++choice[a];
    }
  }

  const NetworkConfig& c_;
  const ScenarioTrace& s_;
  ConstraintSet out_;
};

}  // namespace

ConstraintSet encode(const NetworkConfig& config, const ScenarioTrace& scenario) {
  validate(config);
  scenario.check_dimensions(config);
  return Builder(config, scenario).build();
}

std::string emit_smtlib(const ConstraintSet& cs) {
  std::ostringstream out;
  if (!cs.comment.empty()) out << "; " << cs.comment << "\n";
  out << "(set-logic QF_LIA)\n(set-option :produce-models true)\n";
  for (const Declaration& d : cs.declarations) {
    out << "(declare-const " << d.name << (d.sort == SmtSort::Int ? " Int" : " Bool") << ")\n";
  }
  std::string last_tag;
  for (const Assertion& a : cs.assertions) {
    if (a.tag != last_tag) {
      out << "; " << a.tag << "\n";
      last_tag = a.tag;
    }
    out << "(assert " << a.formula << ")\n";
  }
  out << "(check-sat)\n";
  if (!cs.declarations.empty()) out << "(get-model)\n";
  return out.str();
}

}  // namespace prbslice
