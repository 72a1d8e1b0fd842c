// knotmu: command-line front end.
//
//   knotmu [global flags] mu2 FILE.diagram [--stable N]
//   knotmu [global flags] quad FILE.knot [--unsigned]
//   knotmu [global flags] render FILE.diagram OUT.svg [--cycles]
//   knotmu [global flags] validate FILE.{diagram,knot}
//   knotmu [global flags] c2 FILE.{gauss,pd,knot}
//   knotmu [global flags] perturb FILE.{diagram,knot} --magnitude M [-o OUT]
//
// Exit codes: 0 success, 1 unreadable/malformed/invalid input, 2 degeneracy
// that survived every perturbation retry.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "knotmu/conway.hpp"
#include "knotmu/diagram.hpp"
#include "knotmu/knot.hpp"
#include "knotmu/mu2.hpp"
#include "knotmu/projection.hpp"
#include "knotmu/quadrisecant.hpp"
#include "knotmu/render.hpp"
#include "knotmu/report.hpp"

using namespace knotmu;

namespace {

struct Globals {
  Tolerance tol;
  std::uint64_t seed = 0;
  bool json = false;
  bool timing = false;
};

class Unreadable : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Unreadable("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text) || !(out.flush())) throw Unreadable("cannot write " + path);
}

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string describe(const CyclePoint& p) {
  return p.edge + "@" + fmt("%.6f", p.t) + " (" + fmt("%.6f", p.at.x1) + ", " + fmt("%.6f", p.at.x2) + ")";
}

// Runs body with a fresh report; maps exceptions onto the exit-code contract.
int run(const Globals& g, const std::string& command, const std::string& file,
        const std::function<void(RunReport&, std::string& text)>& body) {
  RunReport rep;
  rep.command = command;
  rep.file = file;
  std::string text;
  int code = 0;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    rep.hash = content_hash(slurp(file));
    body(rep, text);
  } catch (const UnresolvedDegeneracy& e) {
    for (const auto& ev : e.events) rep.degeneracies.push_back(to_json(ev));
    for (const auto& r : e.retries) rep.retries.push_back(to_json(r));
    rep.error = std::string("unresolved degeneracy: ") + e.what();
    code = 2;
  } catch (const UnresolvedQuadDegeneracy& e) {
    for (const auto& ev : e.events) rep.degeneracies.push_back(to_json(ev));
    for (const auto& r : e.retries) rep.retries.push_back(to_json(r));
    rep.error = std::string("unresolved degeneracy: ") + e.what();
    code = 2;
  } catch (const DegenerateConfiguration& e) {
    rep.error = std::string("degenerate configuration: ") + e.what();
    code = 2;
  } catch (const std::exception& e) {
    rep.error = e.what();
    code = 1;
  }
  if (code != 0) rep.parity.reset();
  if (g.timing)
    rep.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (g.json) {
    std::cout << rep.to_json().dump(2) << "\n";
  } else {
    std::cout << text;
    if (rep.timing_ms) std::cout << "time = " << fmt("%.1f", *rep.timing_ms) << " ms\n";
    if (rep.error) std::cerr << "knotmu " << command << ": " << *rep.error << "\n";
  }
  return code;
}

void retries_text(std::string& text, std::size_t events, const nlohmann::json& retries) {
  if (retries.empty()) return;
  text += "retries = " + std::to_string(retries.size()) + " (" + std::to_string(events) + " degeneracy events)\n";
}

int cmd_mu2(const Globals& g, const std::string& file, int stable) {
  return run(g, "mu2", file, [&](RunReport& rep, std::string& text) {
    const DeckerDiagram d = parse_diagram(slurp(file));
    const ValidationReport v = validate(d, g.tol);
    if (!v.valid()) throw StructuralError(std::string(to_string(v.violations[0].kind)) + ": " + v.violations[0].message);
    MuOptions opt;
    opt.seed_base = g.seed;
    const MuResult r = stable > 0 ? stable_mu2(d, stable, g.tol, opt) : mu2(d, g.tol, opt);
    rep.parity = r.mu;
    rep.result = mu_result_json(r);
    for (const auto& e : r.degeneracies) rep.degeneracies.push_back(to_json(e));
    for (const auto& x : r.retries) rep.retries.push_back(to_json(x));
    text += "mu = " + std::to_string(r.mu) + " (n4=" + std::to_string(r.n4) + ", n2=" + std::to_string(r.n2) + ")\n";
    for (std::size_t i = 0; i < r.four_cycles.size(); ++i) {
      const auto& c = r.four_cycles[i];
      text += "4-cycle " + std::to_string(i + 1) + ":";
      for (const auto& p : c.p) text += " " + describe(p);
      text += "\n";
    }
    for (std::size_t i = 0; i < r.two_cycles.size(); ++i) {
      const auto& c = r.two_cycles[i];
      text += "2-cycle " + std::to_string(i + 1) + ":";
      for (const auto& p : c.p) text += " " + describe(p);
      text += "\n";
    }
    if (r.vote)
      text += "vote = " + std::to_string(r.vote->ones) + " ones, " + std::to_string(r.vote->zeros) + " zeros, " +
              std::to_string(r.vote->failed) + " failed of " + std::to_string(r.vote->trials) + "\n";
    retries_text(text, r.degeneracies.size(), rep.retries);
  });
}

int cmd_quad(const Globals& g, const std::string& file, bool unsigned_only) {
  return run(g, "quad", file, [&](RunReport& rep, std::string& text) {
    const PolyKnot k = parse_knot(slurp(file));
    QuadOptions opt;
    opt.compute_signs = !unsigned_only;
    opt.seed_base = g.seed;
    const QuadResult r = alternating_quadrisecants(k, g.tol, opt);
    rep.parity = r.parity;
    rep.result = quad_result_json(r);
    for (const auto& e : r.degeneracies) rep.degeneracies.push_back(to_json(e));
    for (const auto& x : r.retries) rep.retries.push_back(to_json(x));
    for (std::size_t i = 0; i < r.quadrisecants.size(); ++i) {
      const auto& q = r.quadrisecants[i];
      text += "quadrisecant " + std::to_string(i + 1) + ": edges";
      for (auto e : q.edges) text += " " + std::to_string(e);
      text += " at";
      for (double s : q.knot_params) text += " " + fmt("%.6f", s);
      if (q.sign) text += std::string(" sign ") + (*q.sign > 0 ? "+1" : "-1");
      text += "\n";
    }
    text += "count = " + std::to_string(r.quadrisecants.size()) + "\n";
    if (r.signed_count) text += "total = " + std::to_string(r.total) + "\n";
    text += "parity = " + std::to_string(r.parity) + "\n";
    retries_text(text, r.degeneracies.size(), rep.retries);
  });
}

int cmd_render(const Globals& g, const std::string& file, const std::string& out, bool cycles) {
  return run(g, "render", file, [&](RunReport& rep, std::string& text) {
    const DeckerDiagram d = parse_diagram(slurp(file));
    std::vector<FourCycle> four;
    std::vector<TwoCycle> two;
    if (cycles) {
      MuOptions opt;
      opt.seed_base = g.seed;
      const MuResult r = mu2(d, g.tol, opt);
      four = r.four_cycles;
      two = r.two_cycles;
      rep.parity = r.mu;
    }
    write_file(out, render_svg(d, four, two));
    rep.result = {{"svg", out}, {"four_cycles", four.size()}, {"two_cycles", two.size()}};
    text += "wrote " + out + "\n";
  });
}

int cmd_validate(const Globals& g, const std::string& file) {
  bool invalid = false;
  const int code = run(g, "validate", file, [&](RunReport& rep, std::string& text) {
    const std::string src = slurp(file);
    if (has_suffix(file, ".knot")) {
      const PolyKnot k = parse_knot(src);
      validate_knot(k, g.tol);
      rep.result = {{"valid", true}, {"vertices", k.vertices.size()}};
      text += "valid\n";
      return;
    }
    const ValidationReport v = validate(parse_diagram(src), g.tol);
    nlohmann::json list = nlohmann::json::array();
    for (const auto& x : v.violations) {
      list.push_back({{"kind", to_string(x.kind)}, {"message", x.message}});
      text += std::string(to_string(x.kind)) + ": " + x.message + "\n";
    }
    rep.result = {{"valid", v.valid()}, {"violations", list}};
    if (v.valid()) text += "valid\n";
    invalid = !v.valid();
  });
  return code != 0 ? code : (invalid ? 1 : 0);
}

int cmd_c2(const Globals& g, const std::string& file) {
  return run(g, "c2", file, [&](RunReport& rep, std::string& text) {
    const std::string src = slurp(file);
    std::optional<long long> via_gauss;
    PDCode pd;
    if (has_suffix(file, ".pd")) {
      pd = parse_pd(src);
    } else {
      const GaussDiagram gd = has_suffix(file, ".knot") ? gauss_from_knot(parse_knot(src), g.tol) : parse_gauss(src);
      via_gauss = c2_gauss(gd);
      pd = pd_from_gauss(gd);
    }
    const LaurentPoly delta = alexander_polynomial(pd);
    const long long via_alexander = c2_alexander(delta);
    if (via_gauss && *via_gauss != via_alexander)
      throw StructuralError("c2 disagreement: gauss " + std::to_string(*via_gauss) + ", alexander " +
                            std::to_string(via_alexander));
    rep.parity = static_cast<int>(((via_alexander % 2) + 2) % 2);
    rep.result = {{"c2", via_alexander}, {"alexander", to_string(delta)}, {"crossings", pd.crossings.size()}};
    if (via_gauss) rep.result["c2_gauss"] = *via_gauss;
    text += "alexander = " + to_string(delta) + "\n";
    text += "c2 = " + std::to_string(via_alexander) + "\n";
  });
}

int cmd_perturb(const Globals& g, const std::string& file, double magnitude, const std::string& out) {
  return run(g, "perturb", file, [&](RunReport& rep, std::string& text) {
    const std::string src = slurp(file);
    std::string result;
    if (has_suffix(file, ".knot")) {
      if (!(magnitude >= 0)) throw DomainError("perturbation magnitude must be non-negative");
      result = serialize_knot(perturb_knot(parse_knot(src), g.seed, magnitude));
    } else {
      result = serialize_diagram(perturb_diagram(parse_diagram(src), g.seed, magnitude, g.tol));
    }
    rep.result = {{"seed", g.seed}, {"magnitude", magnitude}};
    if (out.empty() || out == "-") {
      text += result;
    } else {
      write_file(out, result);
      rep.result["output"] = out;
      text += "wrote " + out + "\n";
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mu invariant of 2-knots from decker diagrams, and quadrisecant counts of classical knots"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--tol-eq", g.tol.eq_tol, "root/equality tolerance")->capture_default_str();
  app.add_option("--tol-sep", g.tol.sep_tol, "point separation tolerance")->capture_default_str();
  app.add_option("--seed", g.seed, "base seed for perturbations")->capture_default_str();
  app.add_flag("--json", g.json, "print the run report as JSON");
  app.add_flag("--timing", g.timing, "include wall-clock time");

  std::string file, out;
  int stable = 0;
  bool unsigned_only = false, cycles = false;
  double magnitude = 1e-3;

  auto* mu = app.add_subcommand("mu2", "compute mu and its cycles of overcrossings");
  mu->add_option("file", file, "diagram file")->required();
  mu->add_option("--stable", stable, "majority vote over N perturbed copies (odd)");

  auto* quad = app.add_subcommand("quad", "count alternating quadrisecants of a polygonal knot");
  quad->add_option("file", file, "knot file")->required();
  quad->add_flag("--unsigned", unsigned_only, "skip sign computation");

  auto* render = app.add_subcommand("render", "draw a diagram as SVG");
  render->add_option("file", file, "diagram file")->required();
  render->add_option("out", out, "SVG output path")->required();
  render->add_flag("--cycles", cycles, "compute and mark the cycles of overcrossings");

  auto* val = app.add_subcommand("validate", "check a diagram or knot file");
  val->add_option("file", file, "diagram or knot file")->required();

  auto* c2 = app.add_subcommand("c2", "type-2 invariant from a Gauss code, PD code or knot");
  c2->add_option("file", file, "gauss, pd or knot file")->required();

  auto* pert = app.add_subcommand("perturb", "write a perturbed copy of a diagram or knot");
  pert->add_option("file", file, "diagram or knot file")->required();
  pert->add_option("--magnitude", magnitude, "maximum vertex displacement")->capture_default_str();
  pert->add_option("-o,--output", out, "output path (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    g.tol.check();
  } catch (const std::exception& e) {
    std::cerr << "knotmu: " << e.what() << "\n";
    return 1;
  }

  if (*mu) return cmd_mu2(g, file, stable);
  if (*quad) return cmd_quad(g, file, unsigned_only);
  if (*render) return cmd_render(g, file, out, cycles);
  if (*val) return cmd_validate(g, file);
  if (*c2) return cmd_c2(g, file);
  return cmd_perturb(g, file, magnitude, out);
}
