#include "proxuc/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "proxuc/errors.hpp"

namespace proxuc {

namespace {

struct ParseState {
  std::string origin;

  [[noreturn]] void fail(int line, const std::string& msg) const {
    if (origin.empty()) throw ConfigError("line " + std::to_string(line) + ": " + msg, line);
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg, line);
  }
};

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Cut a '#' comment, honoring double quotes so values may contain '#'.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    else if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

double parse_double(const ParseState& ps, int line, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v.empty()) ps.fail(line, "key '" + key + "' has an empty value");
  errno = 0;
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x))
    ps.fail(line, "key '" + key + "' expects a finite number, got '" + v + "'");
  return x;
}

long long parse_ll(const ParseState& ps, int line, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v.empty()) ps.fail(line, "key '" + key + "' has an empty value");
  errno = 0;
  char* end = nullptr;
  long long x = std::strtoll(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE)
    ps.fail(line, "key '" + key + "' expects an integer, got '" + v + "'");
  return x;
}

int parse_int(const ParseState& ps, int line, const std::string& key, const std::string& raw) {
  long long x = parse_ll(ps, line, key, raw);
  if (x < -(1LL << 31) || x >= (1LL << 31))
    ps.fail(line, "key '" + key + "' is out of range");
  return static_cast<int>(x);
}

unsigned long long parse_u64(const ParseState& ps, int line, const std::string& key,
                             const std::string& raw) {
  const std::string v = trim(raw);
  if (v.empty() || v[0] == '-') ps.fail(line, "key '" + key + "' expects a nonnegative integer");
  errno = 0;
  char* end = nullptr;
  unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE)
    ps.fail(line, "key '" + key + "' expects a nonnegative integer, got '" + v + "'");
  return x;
}

bool parse_bool(const ParseState& ps, int line, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true") return true;
  if (v == "false") return false;
  ps.fail(line, "key '" + key + "' expects true or false, got '" + v + "'");
}

std::string parse_string(const ParseState& ps, int line, const std::string& key,
                         const std::string& raw) {
  const std::string v = trim(raw);
  if (v.empty()) ps.fail(line, "key '" + key + "' has an empty value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"')
      ps.fail(line, "key '" + key + "' has an unterminated string");
    return v.substr(1, v.size() - 2);
  }
  return v;
}

std::vector<double> parse_array(const ParseState& ps, int line, const std::string& key,
                                const std::string& raw) {
  const std::string v = trim(raw);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    ps.fail(line, "key '" + key + "' expects an array like [0.5, 1.0]");
  const std::string inner = trim(v.substr(1, v.size() - 2));
  if (inner.empty()) ps.fail(line, "key '" + key + "' expects a nonempty array");
  std::vector<double> out;
  size_t pos = 0;
  while (pos <= inner.size()) {
    size_t comma = inner.find(',', pos);
    const std::string item = inner.substr(pos, comma == std::string::npos ? std::string::npos
                                                                          : comma - pos);
    out.push_back(parse_double(ps, line, key, item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

bool valid_check_name(const std::string& name) {
  if (name.empty()) return false;
  for (char c : name) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

std::string known_kinds() {
  std::string s;
  for (CheckKind k : all_check_kinds()) {
    if (!s.empty()) s += ", ";
    s += check_kind_name(k);
  }
  return s;
}

enum class Section { None, Run, Tabulate, Check };

void apply_check_key(const ParseState& ps, int line, CheckSpec& spec, bool& has_kind,
                     const std::string& key, const std::string& raw) {
  if (key == "kind") {
    const std::string v = parse_string(ps, line, key, raw);
    auto k = parse_check_kind(v);
    if (!k) ps.fail(line, "unknown check kind '" + v + "' (known: " + known_kinds() + ")");
    spec.kind = *k;
    has_kind = true;
  } else if (key == "space_p") {
    spec.space_p = parse_double(ps, line, key, raw);
  } else if (key == "dim") {
    spec.dim = parse_int(ps, line, key, raw);
  } else if (key == "young") {
    spec.young = parse_string(ps, line, key, raw);
  } else if (key == "young_p") {
    spec.young_p = parse_double(ps, line, key, raw);
  } else if (key == "objective") {
    spec.objective = parse_string(ps, line, key, raw);
  } else if (key == "prox_kind") {
    spec.prox_kind = parse_string(ps, line, key, raw);
  } else if (key == "variant") {
    spec.variant = parse_string(ps, line, key, raw);
  } else if (key == "center") {
    spec.center = parse_array(ps, line, key, raw);
  } else if (key == "ball_radius") {
    spec.ball_radius = parse_double(ps, line, key, raw);
  } else if (key == "eps_grid") {
    spec.eps_grid = parse_array(ps, line, key, raw);
  } else if (key == "lam_grid") {
    spec.lam_grid = parse_array(ps, line, key, raw);
  } else if (key == "samples") {
    spec.samples = parse_int(ps, line, key, raw);
  } else if (key == "seed") {
    spec.seed = parse_u64(ps, line, key, raw);
  } else if (key == "tol") {
    spec.tol = parse_double(ps, line, key, raw);
  } else if (key == "budget") {
    spec.budget = parse_int(ps, line, key, raw);
  } else if (key == "grid_backstop") {
    spec.grid_backstop = parse_bool(ps, line, key, raw);
  } else if (key == "hoelder_r") {
    spec.hoelder_r = parse_double(ps, line, key, raw);
  } else {
    ps.fail(line, "unknown key '" + key + "' in [check " + spec.name + "]");
  }
}

}  // namespace

Config parse_config_text(const std::string& text, const std::string& origin) {
  ParseState ps{origin};
  Config cfg;
  Section section = Section::None;
  int check_line = 0;  // header line of the open check, for the missing-kind error
  bool has_kind = false;

  auto close_check = [&]() {
    if (section == Section::Check && !has_kind)
      ps.fail(check_line, "check '" + cfg.run.checks.back().name + "' is missing the 'kind' key");
  };

  std::istringstream in(text);
  std::string raw_line;
  int line = 0;
  while (std::getline(in, raw_line)) {
    ++line;
    std::string s = trim(strip_comment(raw_line));
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') ps.fail(line, "unterminated section header");
      const std::string head = trim(s.substr(1, s.size() - 2));
      close_check();
      if (head == "run") {
        section = Section::Run;
      } else if (head == "tabulate") {
        section = Section::Tabulate;
      } else if (head.rfind("check", 0) == 0 &&
                 (head.size() == 5 || std::isspace(static_cast<unsigned char>(head[5])))) {
        const std::string name = trim(head.substr(5));
        if (!valid_check_name(name))
          ps.fail(line, "check name must be nonempty and use only letters, digits, '_', '-', '.'");
        for (const CheckSpec& c : cfg.run.checks)
          if (c.name == name) ps.fail(line, "duplicate check name '" + name + "'");
        CheckSpec spec;
        spec.name = name;
        cfg.run.checks.push_back(std::move(spec));
        section = Section::Check;
        check_line = line;
        has_kind = false;
      } else {
        ps.fail(line, "unknown section [" + head + "] (expected [run], [tabulate], or [check NAME])");
      }
      continue;
    }

    size_t eq = s.find('=');
    if (eq == std::string::npos) ps.fail(line, "expected 'key = value' or a section header");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = s.substr(eq + 1);
    if (key.empty()) ps.fail(line, "missing key before '='");

    switch (section) {
      case Section::None:
        ps.fail(line, "key '" + key + "' appears before any section header");
      case Section::Run:
        if (key == "out_dir") {
          cfg.run.out_dir = parse_string(ps, line, key, value);
        } else if (key == "workers") {
          int w = parse_int(ps, line, key, value);
          if (w < 0) ps.fail(line, "key 'workers' expects a nonnegative integer");
          cfg.run.workers = w;
        } else {
          ps.fail(line, "unknown key '" + key + "' in [run]");
        }
        break;
      case Section::Tabulate:
        if (key == "out_dir") {
          cfg.tabulate.out_dir = parse_string(ps, line, key, value);
        } else {
          ps.fail(line, "unknown key '" + key + "' in [tabulate]");
        }
        break;
      case Section::Check:
        apply_check_key(ps, line, cfg.run.checks.back(), has_kind, key, value);
        break;
    }
  }
  close_check();
  return cfg;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace proxuc
