#include "pdlkit/soundness.hpp"

#include <atomic>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include "pdlkit/io.hpp"
#include "pdlkit/model_search.hpp"
#include "pdlkit/parser.hpp"
#include "pdlkit/substitution.hpp"

namespace pdl {

namespace {

class Pool {
 public:
  Pool(const SoundnessConfig& c, std::uint64_t salt) : rng_(c.seed * 0x9E3779B97F4A7C15ULL + salt), c_(c) {}

  Formula formula(int depth) {
    if (depth <= 0 || coin(0.2)) {
      const int k = pick(static_cast<int>(c_.props.size()) + 2);
      if (k == static_cast<int>(c_.props.size())) return Formula::falsum();
      if (k > static_cast<int>(c_.props.size())) return verum();
      return Formula::prop(c_.props[k]);
    }
    switch (pick(4)) {
      case 0:
        return Formula::negation(formula(depth - 1));
      case 1:
        return Formula::disjunction(formula(depth - 1), formula(depth - 1));
      case 2:
        return conj(formula(depth - 1), formula(depth - 1));
      default:
        return Formula::diamond(program(depth - 1), formula(depth - 1));
    }
  }

  Program program(int depth) {
    if (c_.programs.empty()) return Program::test(formula(depth - 1));
    if (depth <= 0 || coin(0.25)) return Program::atomic(c_.programs[pick(static_cast<int>(c_.programs.size()))]);
    switch (pick(5)) {
      case 0:
        return Program::seq(program(depth - 1), program(depth - 1));
      case 1:
        return Program::inter(program(depth - 1), program(depth - 1));
      case 2:
        return Program::choice(program(depth - 1), program(depth - 1));
      case 3:
        return Program::test(formula(depth - 1));
      default:
        return loop(program(depth - 1));
    }
  }

  Binding binding() {
    Binding b;
    for (const char* m : {"p", "q", "r"}) b[m] = formula(c_.depth);
    for (const char* m : {"alpha", "beta", "gamma", "beta1", "beta2", "beta3"}) b[m] = program(c_.depth);
    return b;
  }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

 private:
  std::mt19937_64 rng_;
  const SoundnessConfig& c_;
};

// One sampled check.  Premises must be valid for the conclusion to count;
// for TP the validity of `conclusion` and `partner` must agree.
struct Task {
  std::vector<Statement> premises;
  Statement conclusion;
  std::optional<Statement> partner;
};

struct Found {
  SearchOutcome outcome;
  std::string text;
};

struct Verdict {
  bool skipped = false;
  std::optional<Found> counter;
};

SearchOutcome check(const Statement& s, const SearchBudget& b) {
  if (const auto* f = std::get_if<Formula>(&s)) return check_validity(*f, b);
  return check_program_judgement(std::get<ProgramJudgement>(s), b);
}

bool valid(const SearchOutcome& o) { return o.kind == OutcomeKind::ValidUpTo; }

Verdict run_task(const Task& t, const SearchBudget& b) {
  Verdict v;
  for (const auto& p : t.premises) {
    if (!valid(check(p, b))) {
      v.skipped = true;
      return v;
    }
  }
  auto out = check(t.conclusion, b);
  if (t.partner) {
    auto other = check(*t.partner, b);
    if (valid(out) != valid(other)) {
      const bool first_fails = !valid(out);
      v.counter = Found{first_fails ? out : other, render(t.conclusion) + "  vs  " + render(*t.partner)};
    }
    return v;
  }
  if (!valid(out)) v.counter = Found{out, render(t.conclusion)};
  return v;
}

SoundnessEntry run_entry(std::string name, std::string kind, const std::vector<Task>& tasks,
                         const SoundnessConfig& c) {
  SoundnessEntry e;
  e.name = std::move(name);
  e.kind = std::move(kind);
  SearchBudget b;
  b.max_worlds = c.max_worlds;
  b.jobs = 1;

  std::vector<Verdict> verdicts(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> stop{tasks.size()};
  std::mutex mu;
  std::exception_ptr error;
  auto worker = [&] {
    try {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size() || i > stop.load()) return;
        verdicts[i] = run_task(tasks[i], b);
        if (c.stop_at_first && verdicts[i].counter) {
          std::size_t cur = stop.load();
          while (i < cur && !stop.compare_exchange_weak(cur, i)) {
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      error = std::current_exception();
    }
  };
  const unsigned jobs = std::max(1U, c.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  const std::size_t end = std::min(tasks.size(), c.stop_at_first ? stop.load() + 1 : tasks.size());
  for (std::size_t i = 0; i < end; ++i) {
    const auto& v = verdicts[i];
    if (v.skipped) {
      ++e.skipped;
      continue;
    }
    ++e.instances;
    if (!v.counter) continue;
    if (e.counterexamples++ == 0) {
      e.first = v.counter->text;
      e.structure = v.counter->outcome.structure;
      e.world = v.counter->outcome.world;
      e.pair = v.counter->outcome.pair;
    }
  }
  return e;
}

// Samples up to `want` distinct tasks; `make` returns nullopt to reject.
template <class Make>
std::vector<Task> sample(std::size_t want, Make make) {
  std::vector<Task> out;
  std::set<std::string> seen;
  const std::size_t attempts = want * 40 + 100;
  for (std::size_t i = 0; i < attempts && out.size() < want; ++i) {
    auto t = make();
    if (!t) continue;
    std::string key;
    for (const auto& p : t->premises) key += render(p) + " ;; ";
    key += render(t->conclusion);
    if (seen.insert(key).second) out.push_back(std::move(*t));
  }
  return out;
}

std::uint64_t salt_of(const std::string& name) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : name) h = (h ^ ch) * 1099511628211ULL;
  return h;
}

std::vector<Task> scheme_tasks(const Scheme& s, const SoundnessConfig& c) {
  Pool pool(c, salt_of(s.name));
  return sample(c.instances, [&]() -> std::optional<Task> {
    return Task{{}, instantiate(s, pool.binding()), std::nullopt};
  });
}

std::vector<Task> tp_tasks(const SoundnessConfig& c) {
  Pool pool(c, salt_of("TP"));
  std::vector<const Scheme*> iffs;
  for (const auto& s : formula_schemes())
    if (s.name != "K" && s.name != "C1" && s.name != "C2" && s.name != "C3") iffs.push_back(&s);
  return sample(c.instances, [&]() -> std::optional<Task> {
    Formula l;
    Formula r;
    if (pool.coin(0.5)) {
      const Formula inst = std::get<Formula>(instantiate(*iffs[pool.pick(static_cast<int>(iffs.size()))], pool.binding()));
      // iff(x, y) = ~(~(~x | y) | ~(~y | x))
      const Formula& left_impl = inst.operand().lhs().operand();
      l = left_impl.lhs().operand();
      r = left_impl.rhs();
    } else {
      l = pool.formula(c.depth);
      r = pool.formula(c.depth);
    }
    return Task{{}, iff(l, r), Statement{ProgramJudgement{JudgementKind::Equiv, Program::test(l), Program::test(r)}}};
  });
}

std::vector<Task> c_tasks(const SoundnessConfig& c) {
  Pool pool(c, salt_of("C"));
  return sample(c.instances, [&]() -> std::optional<Task> {
    const Program b1 = pool.coin(0.2) ? Program::test(verum()) : pool.program(c.depth);
    const Program b2 = pool.program(c.depth);
    const Program b3 = pool.program(c.depth);
    const Formula p = pool.formula(c.depth);
    const Program pat = rule_c_pattern(b1, b2, b3, p);
    Program host = pat;
    switch (pool.pick(4)) {
      case 1:
        host = Program::seq(pat, pool.program(1));
        break;
      case 2:
        host = Program::seq(pool.program(1), pat);
        break;
      case 3:
        host = Program::inter(pat, pool.program(1));
        break;
      default:
        break;
    }
    const Program to = replace_subprogram(host, pat, rule_c_replacement(b1, b2, b3, p), true);
    return Task{{}, ProgramJudgement{JudgementKind::Implies, loop(host), loop(to)}, std::nullopt};
  });
}

Formula formula_instance(Pool& pool, Binding b = {}) {
  const auto& all = formula_schemes();
  Binding fresh = pool.binding();
  for (auto& [k, v] : b) fresh[k] = v;
  return std::get<Formula>(instantiate(all[pool.pick(static_cast<int>(all.size()))], fresh));
}

std::vector<Task> mp_tasks(const SoundnessConfig& c) {
  Pool pool(c, salt_of("MP"));
  return sample(c.instances, [&]() -> std::optional<Task> {
    const Formula phi = formula_instance(pool);
    const Formula chi = pool.formula(c.depth);
    Formula psi;
    switch (pool.pick(4)) {
      case 0:
        psi = impl(chi, phi);
        break;
      case 1:
        psi = Formula::disjunction(phi, chi);
        break;
      case 2:
        psi = Formula::negation(Formula::negation(phi));
        break;
      default:
        psi = conj(phi, Formula::disjunction(chi, Formula::negation(chi)));
        break;
    }
    const Formula implication = impl(phi, psi);
    if (!is_tautology(implication)) return std::nullopt;
    return Task{{phi, implication}, psi, std::nullopt};
  });
}

std::vector<Task> gen_tasks(const SoundnessConfig& c) {
  Pool pool(c, salt_of("Gen"));
  return sample(c.instances, [&]() -> std::optional<Task> {
    const Formula phi = formula_instance(pool);
    return Task{{phi}, box(pool.program(c.depth), phi), std::nullopt};
  });
}

std::vector<Task> usub_tasks(const SoundnessConfig& c) {
  Pool pool(c, salt_of("USub"));
  return sample(c.instances, [&]() -> std::optional<Task> {
    if (c.props.empty()) return std::nullopt;
    const Formula phi = formula_instance(pool);
    const std::string& prop = c.props[pool.pick(static_cast<int>(c.props.size()))];
    return Task{{phi}, usub(phi, pool.formula(c.depth), prop), std::nullopt};
  });
}

std::vector<Task> psub_tasks(const SoundnessConfig& c) {
  Pool pool(c, salt_of("PSub"));
  const auto& progs = program_schemes();
  return sample(c.instances, [&]() -> std::optional<Task> {
    auto j = std::get<ProgramJudgement>(instantiate(progs[pool.pick(static_cast<int>(progs.size()))], pool.binding()));
    if (j.kind == JudgementKind::Equiv && pool.coin(0.5)) std::swap(j.left, j.right);
    j.kind = JudgementKind::Implies;
    const Formula phi = formula_instance(pool, Binding{{"alpha", j.left}});
    const Formula out = psub(phi, j.left, j.right);
    if (out == phi) return std::nullopt;
    return Task{{j, phi}, out, std::nullopt};
  });
}

void warn_if_empty(SoundnessReport& r) {
  for (const auto& e : r.entries)
    if (e.instances == 0) r.warnings.push_back(e.name + ": no instances, vacuous pass");
}

}  // namespace

std::size_t SoundnessReport::counterexamples() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.counterexamples;
  return n;
}

bool SoundnessReport::ok() const { return counterexamples() == 0; }

const SoundnessEntry* SoundnessReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

SoundnessReport check_schemes(const std::vector<Scheme>& schemes, const SoundnessConfig& c) {
  SoundnessReport r;
  r.max_worlds = c.max_worlds;
  for (const auto& s : schemes)
    r.entries.push_back(run_entry(s.name, s.is_program() ? "program" : "formula", scheme_tasks(s, c), c));
  warn_if_empty(r);
  return r;
}

SoundnessReport check_calculus(const SoundnessConfig& c) {
  SoundnessReport r = check_schemes(formula_schemes(), c);
  SoundnessReport p = check_schemes(program_schemes(), c);
  r.entries.insert(r.entries.end(), p.entries.begin(), p.entries.end());
  r.entries.push_back(run_entry("TP", "program", tp_tasks(c), c));
  r.entries.push_back(run_entry("C", "program", c_tasks(c), c));
  r.entries.push_back(run_entry("MP", "rule", mp_tasks(c), c));
  r.entries.push_back(run_entry("Gen", "rule", gen_tasks(c), c));
  r.entries.push_back(run_entry("USub", "rule", usub_tasks(c), c));
  r.entries.push_back(run_entry("PSub", "rule", psub_tasks(c), c));
  r.warnings.clear();
  warn_if_empty(r);
  return r;
}

const std::vector<Scheme>& mutated_schemes() {
  static const std::vector<Scheme> all = {
      make_scheme("Dl/diamond", "[alpha]p <-> <alpha>p"),
      make_scheme("?/or", "<p?>q <-> p | q"),
      make_scheme("T1/or", "<alpha & p?>q <-> <alpha^>(p | q)"),
      make_scheme(";/swapped", "[alpha;beta]p <-> [beta][alpha]p"),
      make_scheme("D/and", "<alpha + beta>p <-> <alpha>p & <beta>p"),
      make_scheme("K/reversed", "([alpha]p -> [alpha]q) -> [alpha](p -> q)"),
      make_scheme("C1/no-loop", "<alpha>p & <beta>q -> <alpha;beta>(p & q)"),
      make_scheme("C3/no-loop", "<alpha>p & [alpha]q -> p & q"),
      make_scheme("V/and", "<alpha;(p | q)?;beta>r <-> <alpha;p?;beta>r & <alpha;q?;beta>r"),
      make_scheme("Wk/reversed", "alpha => alpha & beta"),
      make_scheme("Cm/drop", "alpha & beta <=> alpha"),
      make_scheme("D3/inter", "(alpha + beta);gamma <=> (alpha;gamma) & (beta;gamma)"),
      make_scheme("T3/moved", "(p?;alpha) & beta <=> (alpha & beta);p?"),
      make_scheme("A/mixed", "alpha + (beta & gamma) <=> (alpha + beta) & gamma"),
  };
  return all;
}

nlohmann::json to_json(const SoundnessReport& r) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : r.entries) {
    nlohmann::json j{{"name", e.name},
                     {"kind", e.kind},
                     {"instances", e.instances},
                     {"counterexamples", e.counterexamples},
                     {"ok", e.ok()}};
    if (e.skipped) j["skipped_premises"] = e.skipped;
    if (e.first) {
      nlohmann::json cm{{"statement", *e.first}};
      if (e.structure) {
        cm["model"] = to_json(*e.structure);
        cm["world"] = e.structure->world_name(e.world);
        if (e.pair)
          cm["pair"] = {e.structure->world_name(e.pair->first), e.structure->world_name(e.pair->second)};
      }
      j["first_counterexample"] = cm;
    }
    entries.push_back(j);
  }
  return {{"max_worlds", r.max_worlds},
          {"ok", r.ok()},
          {"counterexamples", r.counterexamples()},
          {"warnings", r.warnings},
          {"entries", entries}};
}

}  // namespace pdl
