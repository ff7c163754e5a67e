#include "cli.hpp"

#include "solenoid/certify.hpp"
#include "solenoid/classify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace solenoid::cli {

namespace {

struct Globals {
  std::string config;
  std::string plan;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  double tolerance_scale = 1;
};

nlohmann::json read_json(const std::string& path, const char* what) {
  if (path.empty()) throw Error(std::string("missing --") + what + " file");
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + std::string(what) + " file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid ") + what + " file '" + path + "': " + e.what());
  }
}

void emit(const Globals& g, const std::string& text, std::ostream& out) {
  if (g.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw Error("cannot write '" + g.out + "'");
  f << text;
}

SolenoidPlan load_plan(const Globals& g) { return SolenoidPlan::from_json(read_json(g.plan, "plan")); }

PlanConfig load_config(const Globals& g) {
  PlanConfig c = PlanConfig::from_json(read_json(g.config, "config"));
  if (g.seed) c.seed = *g.seed;
  return c;
}

void print_table(const SolenoidPlan& p, std::ostream& os) {
  std::vector<std::array<std::string, 5>> rows{{"level", "order", "disks", "epsilon", "delta"}};
  for (std::size_t l = 0; l <= p.depth(); ++l) {
    const LevelGeometry& g = p.level(l);
    rows.push_back({std::to_string(l), l == 0 ? "1" : to_string(p.chain.level(l).group.order()), to_string(p.chain.gamma_index(l)),
                    to_string(g.epsilon), l == 0 ? "-" : to_string(g.delta)});
  }
  std::array<std::size_t, 5> width{};
  for (const auto& row : rows)
    for (std::size_t c = 0; c < 5; ++c) width[c] = std::max(width[c], row[c].size());
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < 4; ++c) os << std::left << std::setw(static_cast<int>(width[c] + 2)) << row[c];
    os << row[4] << "\n";
  }
}

std::string plan_text(const SolenoidPlan& p) { return p.to_json().dump(2) + "\n"; }

Point parse_point(const std::string& s, std::size_t q) {
  Point p;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      p.push_back(std::stod(item, &used));
      if (used != item.size()) throw Error("");
    } catch (...) {
      throw Error("cannot parse point coordinate '" + item + "'");
    }
  }
  if (p.size() != q) throw Error("point needs " + std::to_string(q) + " coordinates");
  if (norm(p) > 1) throw Error("point lies outside the closed unit disk");
  return p;
}

CoveringDegrees load_degrees(const std::string& path) {
  nlohmann::json j = read_json(path, "degrees");
  if (j.is_object() && j.value("format", "") == "solenoid-plan") return covering_degrees(SolenoidPlan::from_json(j).chain);
  return CoveringDegrees::from_json(j);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Build, evaluate, certify and classify disk actions with solenoidal minimal sets", "solenoid"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed_value = 0;
  app.add_option("--config", g.config, "Plan config JSON");
  app.add_option("--plan", g.plan, "Plan JSON written by 'plan' or 'build'");
  app.add_option("--out", g.out, "Output file (default: standard output)");
  auto* seed_opt = app.add_option("--seed", seed_value, "Seed for auto plans and certification sampling");
  app.add_option("--jobs", g.jobs, "Worker threads for certification sweeps")->check(CLI::Range(1u, 256u));
  app.add_option("--tolerance-scale", g.tolerance_scale, "Multiplier on every certification tolerance")
      ->check(CLI::PositiveNumber);
  app.fallthrough();

  auto* plan_cmd = app.add_subcommand("plan", "Build a plan from --config and write it");
  auto* build_cmd = app.add_subcommand("build", "Build a plan, expand its disk tree and check the plan invariants");

  auto* certify_cmd = app.add_subcommand("certify", "Certify a plan and write the JSON report");
  int r = 0;
  certify_cmd->add_option("-r,--order", r, "Derivative order to certify (default: the plan's order)");

  auto* orbit_cmd = app.add_subcommand("orbit", "Orbit of a point over a word box, as CSV");
  std::string point_text;
  int radius = 1;
  long orbit_level = -1;
  orbit_cmd->add_option("--point", point_text, "Comma-separated coordinates")->required();
  orbit_cmd->add_option("--radius", radius, "Word radius R (|g|_inf <= R)")->check(CLI::NonNegativeNumber);
  orbit_cmd->add_option("--level", orbit_level, "Evaluation depth (default: plan depth)");

  auto* export_cmd = app.add_subcommand("export-tree", "Export the nested disk tree as JSON");
  long export_level = -1;
  bool cantor = false;
  export_cmd->add_option("--level", export_level, "Deepest level exported (default: plan depth)");
  export_cmd->add_flag("--cantor", cantor, "Export only the deepest disks as a flat list");

  auto* classify_cmd = app.add_subcommand("classify", "Fiber invariant of one degree file, or compare two");
  std::vector<std::string> degree_files;
  classify_cmd->add_option("files", degree_files, "Degree JSON ({prefix, tail}) or plan files")->required()->expected(1, 2);

  auto* example_cmd = app.add_subcommand("example5", "Write the preset plan with rotations 1/n_l");
  std::vector<long> ns{2, 3, 4};
  std::size_t example_q = 2;
  example_cmd->add_option("--ns", ns, "Rotation denominators n_1 n_2 ...")->delimiter(',');
  example_cmd->add_option("--q", example_q, "Disk dimension (2 or 3)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    if (plan_cmd->parsed() || build_cmd->parsed()) {
      SolenoidPlan p = build(load_config(g));
      print_table(p, plan_cmd->parsed() && g.out.empty() ? err : out);
      if (build_cmd->parsed()) {
        DiskTree tree(p);
        auto inv = plan_invariants(p);
        std::size_t failed = 0;
        for (const auto& c : inv)
          if (!c.pass) {
            ++failed;
            err << "invariant failed: " << c.name << " at level " << c.level << " (" << c.note << ")\n";
          }
        std::ostream& log = g.out.empty() ? err : out;
        for (std::size_t l = 0; l <= p.depth(); ++l)
          log << "level " << l << ": " << to_string(p.chain.gamma_index(l)) << " disks of radius " << to_string(p.level(l).epsilon)
              << "\n";
        emit(g, plan_text(p), out);
        return failed ? kExitCertificationFailed : kExitOk;
      }
      emit(g, plan_text(p), out);
      return kExitOk;
    }

    if (example_cmd->parsed()) {
      PlanConfig c;
      c.mode = PlanMode::Example5;
      c.q = example_q;
      for (long n : ns) c.ns.push_back(n);
      c.levels = ns.size();
      SolenoidPlan p = build(c);
      print_table(p, g.out.empty() ? err : out);
      emit(g, plan_text(p), out);
      return kExitOk;
    }

    if (certify_cmd->parsed()) {
      SolenoidPlan p = load_plan(g);
      CertifyOptions o;
      o.seed = g.seed.value_or(0);
      o.jobs = g.jobs;
      o.tolerance_scale = g.tolerance_scale;
      const int order = r > 0 ? r : p.r;
      CertificationReport rep = certify(p, order, o);
      emit(g, rep.to_json().dump(2) + "\n", out);
      std::size_t failed = 0;
      for (const auto& c : rep.checks)
        if (c.asserted && !c.pass) {
          ++failed;
          err << "FAIL " << c.name << " level " << c.level << (c.generator >= 0 ? " generator " + std::to_string(c.generator + 1) : "")
              << ": measured " << format_double(c.measured) << (c.note.empty() ? "" : " (" + c.note + ")") << "\n";
        }
      err << (failed ? "certification failed: " + std::to_string(failed) + " asserted checks" : std::string("certification passed"))
          << "\n";
      return failed ? kExitCertificationFailed : kExitOk;
    }

    if (orbit_cmd->parsed()) {
      SolenoidPlan p = load_plan(g);
      DiskTree tree(p);
      const std::size_t L = orbit_level < 0 ? p.depth() : static_cast<std::size_t>(orbit_level);
      auto orbit = tree.orbit_sample(L, parse_point(point_text, p.q), radius);
      emit(g, orbit_csv(orbit, p.k, p.q), out);
      return kExitOk;
    }

    if (export_cmd->parsed()) {
      SolenoidPlan p = load_plan(g);
      DiskTree tree(p);
      const std::size_t L = export_level < 0 ? p.depth() : static_cast<std::size_t>(export_level);
      if (L > p.depth()) throw Error("export level exceeds plan depth");
      nlohmann::json j;
      if (cantor) {
        j = nlohmann::json::array();
        for (const auto& d : tree.cantor_approx(L)) {
          nlohmann::json coset = nlohmann::json::array();
          for (const auto& x : d.gamma) coset.push_back(to_string(x));
          j.push_back({{"coset", coset}, {"center", d.center}, {"radius", to_string(p.level(L).epsilon)}});
        }
      } else {
        j = tree.export_tree(L);
      }
      emit(g, j.dump(2) + "\n", out);
      return kExitOk;
    }

    if (classify_cmd->parsed()) {
      std::vector<SupernaturalNumber> inv;
      nlohmann::json result{{"inputs", nlohmann::json::array()}};
      for (const auto& f : degree_files) {
        CoveringDegrees d = load_degrees(f);
        inv.push_back(cech_invariant(d));
        result["inputs"].push_back({{"file", f}, {"degrees", d.to_json()}, {"invariant", inv.back().to_json()}});
      }
      std::ostringstream text;
      if (inv.size() == 1) {
        text << "invariant: " << inv[0].to_string() << "\n";
      } else {
        BaerVerdict v = baer_compare(inv[0], inv[1]);
        text << (v.equivalent ? "equivalent" : "inequivalent") << "\n";
        text << "left:  " << inv[0].to_string() << "\n" << "right: " << inv[1].to_string() << "\n";
        if (v.equivalent)
          text << "discard left: " << v.discard_left.to_string() << "\n" << "discard right: " << v.discard_right.to_string() << "\n";
        result["equivalent"] = v.equivalent;
        if (v.equivalent) {
          result["discard_left"] = v.discard_left.to_json();
          result["discard_right"] = v.discard_right.to_json();
        }
      }
      out << text.str();
      if (!g.out.empty()) emit(g, result.dump(2) + "\n", out);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kExitUsage;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace solenoid::cli
