#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "toricheights/c_api.h"

using json = nlohmann::json;

namespace {

constexpr int kExitValidation = 2;

struct FileFlag {
  const char* flag;
  const char* key;
  bool repeat = false;  // repeated flags collect into an array
};

struct Leaf {
  const char* group;
  const char* name;
  const char* about;
  const char* primary;  // request key a bare --in document is stored under; "" for whole-request inputs
  std::vector<FileFlag> files;
  std::vector<const char*> scalars;
};

const std::vector<Leaf>& leaves() {
  static const std::vector<Leaf> all{
      {"poly", "mv", "mixed volume of n polytopes", "polytopes", {{"--polytopes", "polytopes"}}, {}},
      {"poly", "vol", "normalized volume", "polytope", {{"--polytope", "polytope"}}, {}},
      {"poly", "newton", "Newton polytope of a Laurent polynomial", "poly", {{"--poly", "poly"}}, {}},
      {"cave", "mi", "mixed integral", "functions", {{"--functions", "functions"}}, {"u_radius", "u_step", "m_step"}},
      {"cave", "dual", "Legendre-Fenchel dual", "function", {{"--function", "function"}}, {}},
      {"cave", "supconv", "sup-convolution", "functions", {{"--functions", "functions"}}, {}},
      {"ronkin", "eval", "Ronkin function at a point", "poly", {{"--poly", "poly"}},
       {"u", "place", "seed", "budget", "batches"}},
      {"ronkin", "roof", "roof function of a Laurent polynomial", "poly", {{"--poly", "poly"}},
       {"place", "seed", "budget", "batches", "u_step", "m_step", "margin"}},
      {"ronkin", "push", "pushforward compatibility check", "poly", {{"--poly", "poly"}},
       {"map", "places", "points", "seed", "budget", "batches"}},
      {"height", "point", "height of a projective point", "", {}, {"conductor", "coords", "precision"}},
      {"height", "tuple", "height of a rational tuple", "coords", {}, {"coords"}},
      {"height", "axioms", "randomized height axiom suite", "", {}, {"seed", "samples"}},
      {"res", "sylvester", "Sylvester resultant form", "", {}, {"n"}},
      {"res", "point", "resultant of a point", "", {}, {"coords", "n"}},
      {"res", "converge", "normalized resultant heights", "", {}, {"case", "nmax", "coords"}},
      {"res", "veronese", "Veronese metric gap", "", {}, {"r", "n", "seed", "samples", "batches"}},
      {"mahler", "torus", "Mahler measure on the torus", "poly", {{"--poly", "poly"}}, {"seed", "samples", "batches"}},
      {"mahler", "sphere", "Mahler measure on the sphere", "poly", {{"--poly", "poly"}}, {"seed", "samples", "batches"}},
      {"mahler", "mixed", "Mahler measure on a product of spheres", "poly", {{"--poly", "poly"}},
       {"partition", "seed", "samples", "batches"}},
      {"mahler", "exact", "univariate Mahler measure from roots", "poly", {{"--poly", "poly"}}, {}},
      {"mahler", "bounds", "bound checks over a random corpus", "", {}, {"seed", "samples", "budget", "batches"}},
      {"toric", "height", "height of a toric variety", "divisors", {{"--divisors", "divisors"}}, {"mi_step"}},
      {"toric", "hyper", "height of a hypersurface", "", {{"--divisors", "divisors"}, {"--poly", "poly"}},
       {"seed", "budget", "batches", "u_step", "m_step", "margin", "mi_step"}},
      {"toric", "gualdi", "height of a complete intersection", "",
       {{"--divisors", "divisors"}, {"--polys", "polys"}},
       {"tol", "seed", "budget", "batches", "u_step", "m_step", "margin", "mi_step"}},
      {"toric", "push", "pushforward reduction check", "", {}, {"n", "k", "seed", "simplices"}},
      {"toric", "experiment", "torsion translate experiment", "",
       {{"--poly", "polys", true}, {"--polys", "polys"}},
       {"N", "samples", "seed", "precision", "limit", "budget", "batches", "u_step", "m_step", "margin"}},
  };
  return all;
}

std::string read_stream(std::istream& in) { return {std::istreambuf_iterator<char>(in), {}}; }

json load_json(const std::string& path) {
  std::string text;
  if (path == "-") {
    text = read_stream(std::cin);
  } else {
    std::ifstream f(path);
    if (!f) throw CLI::ValidationError("cannot read " + path);
    text = read_stream(f);
  }
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw CLI::ValidationError(path + ": " + e.what());
  }
}

// Command-line values: JSON when they parse, comma lists as arrays, strings otherwise.
json parse_value(const std::string& v) {
  try {
    return json::parse(v);
  } catch (const json::exception&) {
  }
  if (v.find(',') != std::string::npos) {
    try {
      return json::parse("[" + v + "]");
    } catch (const json::exception&) {
    }
  }
  return v;
}

std::string flag_of(const std::string& key) {
  std::string s = "--" + key;
  for (auto& c : s) c = c == '_' ? '-' : c;
  return s;
}

struct LeafState {
  const Leaf* leaf = nullptr;
  CLI::App* app = nullptr;
  std::vector<std::string> inputs;
  std::vector<std::vector<std::string>> files;
  std::vector<std::string> scalars;
  std::vector<std::string> sets;
};

struct Globals {
  std::string out = "json";
  std::string output;
  unsigned workers = 0;
};

json build_request(const LeafState& s) {
  json req = json::object();
  const std::string primary = s.leaf->primary;
  for (const auto& path : s.inputs) {
    json doc = load_json(path);
    // A document carrying the primary key (or any object, for keyless commands) is a full request.
    if (doc.is_object() && (primary.empty() || doc.contains(primary))) {
      req.update(doc);
    } else if (primary.empty()) {
      throw CLI::ValidationError(path + ": expected a JSON object");
    } else {
      req[primary] = doc;
    }
  }
  for (std::size_t i = 0; i < s.leaf->files.size(); ++i) {
    const auto& ff = s.leaf->files[i];
    if (s.files[i].empty()) continue;
    if (ff.repeat) {
      json arr = json::array();
      for (const auto& p : s.files[i]) {
        json doc = load_json(p);
        if (doc.is_array()) {
          for (auto& x : doc) arr.push_back(x);
        } else {
          arr.push_back(doc);
        }
      }
      req[ff.key] = arr;
    } else {
      json doc = load_json(s.files[i].back());
      // {"polys": [...]} style wrappers are unwrapped.
      if (doc.is_object() && doc.contains(ff.key) && doc.size() == 1) doc = doc.at(ff.key);
      req[ff.key] = doc;
    }
  }
  for (std::size_t i = 0; i < s.leaf->scalars.size(); ++i) {
    if (!s.scalars[i].empty()) req[s.leaf->scalars[i]] = parse_value(s.scalars[i]);
  }
  for (const auto& kv : s.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--set expects key=value");
    req[kv.substr(0, eq)] = parse_value(kv.substr(eq + 1));
  }
  return req;
}

int emit(const std::string& text, const Globals& g) {
  if (g.output.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return 0;
  }
  std::ofstream f(g.output, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot write " << g.output << "\n";
    return kExitValidation;
  }
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heights of toric varieties and related computations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(th_version()));
  Globals g;

  std::vector<std::unique_ptr<LeafState>> states;
  std::map<std::string, CLI::App*> groups;
  for (const auto& leaf : leaves()) {
    CLI::App*& grp = groups[leaf.group];
    if (grp == nullptr) {
      grp = app.add_subcommand(leaf.group, std::string(leaf.group) + " commands");
      grp->require_subcommand(1);
    }
    auto st = std::make_unique<LeafState>();
    st->leaf = &leaf;
    st->app = grp->add_subcommand(leaf.name, leaf.about);
    st->files.resize(leaf.files.size());
    st->scalars.resize(leaf.scalars.size());
    CLI::App* sub = st->app;
    sub->add_option("--in", st->inputs, "JSON input file; '-' reads stdin");
    sub->add_option("--out", g.out, "output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("-o,--output", g.output, "write the report to a file");
    sub->add_option("--workers", g.workers, "worker threads (default: all cores)");
    sub->add_option("--set", st->sets, "extra request field, key=value");
    for (std::size_t i = 0; i < leaf.files.size(); ++i) {
      sub->add_option(leaf.files[i].flag, st->files[i], "JSON file");
    }
    for (std::size_t i = 0; i < leaf.scalars.size(); ++i) {
      sub->add_option(flag_of(leaf.scalars[i]), st->scalars[i]);
    }
    states.push_back(std::move(st));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  const LeafState* chosen = nullptr;
  for (const auto& st : states) {
    if (st->app->parsed()) chosen = st.get();
  }
  if (chosen == nullptr) {
    std::cerr << "error: no command given\n";
    return kExitValidation;
  }

  json request;
  try {
    request = build_request(*chosen);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  std::unique_ptr<th_context, decltype(&th_context_free)> ctx(th_context_new(), th_context_free);
  if (!ctx) {
    std::cerr << "error: out of memory\n";
    return 1;
  }
  th_set_workers(ctx.get(), g.workers);
  std::string op = std::string(chosen->leaf->group) + "." + chosen->leaf->name;
  int status = th_run(ctx.get(), op.c_str(), request.dump().c_str());
  if (status != TH_OK && status != TH_ERR_NUMERIC) {
    std::cerr << "error: " << th_last_error(ctx.get()) << "\n";
    return status == TH_ERR_VALIDATION ? kExitValidation : 1;
  }
  // Numeric-target failures still carry a report when one was produced.
  std::string text = g.out == "csv" ? th_result_csv(ctx.get()) : th_result(ctx.get());
  if (g.out == "csv" && text.empty() && status == TH_OK) {
    std::cerr << "error: " << op << " has no CSV form\n";
    return kExitValidation;
  }
  int rc = emit(text, g);
  if (rc != 0) return rc;
  if (status == TH_ERR_NUMERIC) {
    std::cerr << "error: " << th_last_error(ctx.get()) << "\n";
    return 3;
  }
  return 0;
}
