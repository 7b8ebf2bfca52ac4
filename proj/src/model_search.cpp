#include "pdlkit/model_search.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>
#include <unordered_map>
#include <vector>

namespace pdl {

std::string to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::ModelFound: return "ModelFound";
    case OutcomeKind::NoModelUpTo: return "NoModelUpTo";
    case OutcomeKind::ValidUpTo: return "ValidUpTo";
    case OutcomeKind::Countermodel: return "Countermodel";
  }
  return "?";
}

unsigned default_jobs() {
  if (const char* env = std::getenv("PDLKIT_JOBS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

namespace {

// Bit-sliced evaluation: lane j of every word belongs to the j-th structure
// of a batch of 64.
constexpr std::size_t kMaxN = 4;
using Set = std::array<std::uint64_t, kMaxN>;
using Rel = std::array<std::uint64_t, kMaxN * kMaxN>;  // index u * n + v

constexpr std::uint64_t kLanePattern[6] = {
    0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
    0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};

std::vector<std::vector<std::size_t>> permutations(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<std::size_t>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Codes of the first symbol that are minimal in their orbit.
std::vector<std::uint64_t> orbit_representatives(std::size_t n, bool relation) {
  const std::size_t bits = relation ? n * n : n;
  const auto perms = permutations(n);
  std::vector<std::uint64_t> reps;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits); ++code) {
    bool minimal = true;
    for (const auto& p : perms) {
      std::uint64_t image = 0;
      if (relation) {
        for (std::size_t u = 0; u < n; ++u)
          for (std::size_t v = 0; v < n; ++v)
            if ((code >> (u * n + v)) & 1U) image |= std::uint64_t{1} << (p[u] * n + p[v]);
      } else {
        for (std::size_t w = 0; w < n; ++w)
          if ((code >> w) & 1U) image |= std::uint64_t{1} << p[w];
      }
      if (image < code) {
        minimal = false;
        break;
      }
    }
    if (minimal) reps.push_back(code);
  }
  return reps;
}

const std::vector<std::uint64_t>& cached_representatives(std::size_t n, bool relation) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, bool>, std::vector<std::uint64_t>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, relation);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, orbit_representatives(n, relation)).first;
  return it->second;
}

struct Space {
  std::size_t n = 0;
  std::vector<std::string> props;
  std::vector<std::string> progs;
  bool has_first = false;
  bool first_is_prog = false;
  const std::vector<std::uint64_t>* reps = nullptr;
  std::size_t free_bits = 0;

  Space(std::size_t worlds, const Vocabulary& vocab)
      : n(worlds), props(vocab.props.begin(), vocab.props.end()),
        progs(vocab.programs.begin(), vocab.programs.end()) {
    has_first = !props.empty() || !progs.empty();
    first_is_prog = !progs.empty();
    static const std::vector<std::uint64_t> single{0};
    reps = has_first ? &cached_representatives(n, first_is_prog) : &single;
    free_bits = props.size() * n + progs.size() * n * n;
    if (has_first) free_bits -= first_is_prog ? n * n : n;
  }

  std::uint64_t batches_per_rep() const {
    return free_bits > 6 ? std::uint64_t{1} << (free_bits - 6) : 1;
  }
  std::uint64_t batches() const { return reps->size() * batches_per_rep(); }
  std::uint64_t lanes() const {
    return free_bits >= 6 ? ~std::uint64_t{0} : (std::uint64_t{1} << (std::uint64_t{1} << free_bits)) - 1;
  }
  std::uint64_t structures() const { return reps->size() << free_bits; }

  // Free bit i: first the non-first propositions (n bits each), then the
  // non-first programs (n*n bits each).
  void load(std::uint64_t batch, std::vector<Set>& pv, std::vector<Rel>& rv) const {
    const std::uint64_t rep = (*reps)[batch / batches_per_rep()];
    const std::uint64_t high = batch % batches_per_rep();
    auto word = [&](std::size_t i) -> std::uint64_t {
      if (i < 6) return kLanePattern[i];
      return ((high >> (i - 6)) & 1U) ? ~std::uint64_t{0} : 0;
    };
    pv.assign(props.size(), Set{});
    rv.assign(progs.size(), Rel{});
    std::size_t i = 0;
    for (std::size_t k = 0; k < props.size(); ++k) {
      for (std::size_t w = 0; w < n; ++w) {
        if (k == 0 && has_first && !first_is_prog)
          pv[k][w] = ((rep >> w) & 1U) ? ~std::uint64_t{0} : 0;
        else
          pv[k][w] = word(i++);
      }
    }
    for (std::size_t k = 0; k < progs.size(); ++k) {
      for (std::size_t e = 0; e < n * n; ++e) {
        if (k == 0 && first_is_prog)
          rv[k][e] = ((rep >> e) & 1U) ? ~std::uint64_t{0} : 0;
        else
          rv[k][e] = word(i++);
      }
    }
  }

  KripkeStructure decode(std::uint64_t batch, unsigned lane) const {
    std::vector<std::string> names;
    for (std::size_t w = 0; w < n; ++w) names.push_back("w" + std::to_string(w));
    Vocabulary v{{props.begin(), props.end()}, {progs.begin(), progs.end()}};
    KripkeStructure k(names, v);
    std::vector<Set> pv;
    std::vector<Rel> rv;
    load(batch, pv, rv);
    for (std::size_t p = 0; p < props.size(); ++p)
      for (std::size_t w = 0; w < n; ++w)
        if ((pv[p][w] >> lane) & 1U) k.set_true(props[p], w);
    for (std::size_t a = 0; a < progs.size(); ++a)
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v2 = 0; v2 < n; ++v2)
          if ((rv[a][u * n + v2] >> lane) & 1U) k.add_edge(progs[a], u, v2);
    return k;
  }
};

enum class Code : std::uint8_t { False, Prop, Not, Or, Dia, Atom, Seq, Union, Inter, Test };

struct Op {
  Code code;
  std::uint32_t out, a, b;
};

// Straight-line code over two register files, one node per distinct subterm.
struct Compiled {
  std::vector<Op> ops;
  std::uint32_t sets = 0;
  std::uint32_t rels = 0;
  std::unordered_map<Formula, std::uint32_t> fmemo;
  std::unordered_map<Program, std::uint32_t> pmemo;
  std::map<std::string, std::uint32_t> prop_index;
  std::map<std::string, std::uint32_t> prog_index;

  explicit Compiled(const Space& s) {
    for (std::uint32_t i = 0; i < s.props.size(); ++i) prop_index[s.props[i]] = i;
    for (std::uint32_t i = 0; i < s.progs.size(); ++i) prog_index[s.progs[i]] = i;
  }

  std::uint32_t formula(const Formula& f) {
    if (auto it = fmemo.find(f); it != fmemo.end()) return it->second;
    Op op{Code::False, 0, 0, 0};
    switch (f.kind()) {
      case FormulaKind::False:
        break;
      case FormulaKind::Prop:
        op = {Code::Prop, 0, prop_index.at(f.name()), 0};
        break;
      case FormulaKind::Not:
        op = {Code::Not, 0, formula(f.operand()), 0};
        break;
      case FormulaKind::Or:
        op = {Code::Or, 0, formula(f.lhs()), formula(f.rhs())};
        break;
      case FormulaKind::Diamond:
        op = {Code::Dia, 0, program(f.program()), formula(f.body())};
        break;
    }
    op.out = sets++;
    ops.push_back(op);
    fmemo.emplace(f, op.out);
    return op.out;
  }

  std::uint32_t program(const Program& p) {
    if (auto it = pmemo.find(p); it != pmemo.end()) return it->second;
    Op op{Code::Atom, 0, 0, 0};
    switch (p.kind()) {
      case ProgramKind::Atomic:
        op = {Code::Atom, 0, prog_index.at(p.name()), 0};
        break;
      case ProgramKind::Seq:
        op = {Code::Seq, 0, program(p.lhs()), program(p.rhs())};
        break;
      case ProgramKind::Union:
        op = {Code::Union, 0, program(p.lhs()), program(p.rhs())};
        break;
      case ProgramKind::Inter:
        op = {Code::Inter, 0, program(p.lhs()), program(p.rhs())};
        break;
      case ProgramKind::Test:
        op = {Code::Test, 0, formula(p.condition()), 0};
        break;
    }
    op.out = rels++;
    ops.push_back(op);
    pmemo.emplace(p, op.out);
    return op.out;
  }
};

template <std::size_t N>
void run(const Compiled& c, const std::vector<Set>& pv, const std::vector<Rel>& rv, std::vector<Set>& S,
         std::vector<Rel>& R) {
  for (const Op& op : c.ops) {
    switch (op.code) {
      case Code::False:
        S[op.out].fill(0);
        break;
      case Code::Prop:
        S[op.out] = pv[op.a];
        break;
      case Code::Not:
        for (std::size_t u = 0; u < N; ++u) S[op.out][u] = ~S[op.a][u];
        break;
      case Code::Or:
        for (std::size_t u = 0; u < N; ++u) S[op.out][u] = S[op.a][u] | S[op.b][u];
        break;
      case Code::Dia: {
        const Rel& r = R[op.a];
        const Set& x = S[op.b];
        for (std::size_t u = 0; u < N; ++u) {
          std::uint64_t acc = 0;
          for (std::size_t v = 0; v < N; ++v) acc |= r[u * N + v] & x[v];
          S[op.out][u] = acc;
        }
        break;
      }
      case Code::Atom:
        R[op.out] = rv[op.a];
        break;
      case Code::Seq: {
        const Rel& l = R[op.a];
        const Rel& r = R[op.b];
        Rel out{};
        for (std::size_t u = 0; u < N; ++u)
          for (std::size_t w = 0; w < N; ++w) {
            const std::uint64_t x = l[u * N + w];
            if (!x) continue;
            for (std::size_t v = 0; v < N; ++v) out[u * N + v] |= x & r[w * N + v];
          }
        R[op.out] = out;
        break;
      }
      case Code::Union:
        for (std::size_t e = 0; e < N * N; ++e) R[op.out][e] = R[op.a][e] | R[op.b][e];
        break;
      case Code::Inter:
        for (std::size_t e = 0; e < N * N; ++e) R[op.out][e] = R[op.a][e] & R[op.b][e];
        break;
      case Code::Test:
        R[op.out].fill(0);
        for (std::size_t u = 0; u < N; ++u) R[op.out][u * N + u] = S[op.a][u];
        break;
    }
  }
}

enum class Goal : std::uint8_t { Satisfy, Falsify, Include, Equal };

struct Query {
  Goal goal;
  std::uint32_t x = 0;  // set register, or left relation
  std::uint32_t y = 0;  // right relation
};

struct Hit {
  std::uint64_t batch = 0;
  unsigned lane = 0;
  std::size_t u = 0;
  std::size_t v = 0;
};

template <std::size_t N>
std::optional<Hit> scan_batch(const Space& s, const Compiled& c, const Query& q, std::uint64_t batch,
                              std::vector<Set>& pv, std::vector<Rel>& rv, std::vector<Set>& S,
                              std::vector<Rel>& R) {
  s.load(batch, pv, rv);
  run<N>(c, pv, rv, S, R);
  const std::uint64_t lanes = s.lanes();
  auto bad_pair = [&](std::size_t e) -> std::uint64_t {
    const std::uint64_t l = R[q.x][e];
    const std::uint64_t r = R[q.y][e];
    return q.goal == Goal::Include ? (l & ~r) : (l ^ r);
  };
  std::uint64_t any = 0;
  if (q.goal == Goal::Satisfy || q.goal == Goal::Falsify) {
    for (std::size_t u = 0; u < N; ++u) any |= q.goal == Goal::Satisfy ? S[q.x][u] : ~S[q.x][u];
  } else {
    for (std::size_t e = 0; e < N * N; ++e) any |= bad_pair(e);
  }
  any &= lanes;
  if (!any) return std::nullopt;
  Hit h;
  h.batch = batch;
  h.lane = static_cast<unsigned>(std::countr_zero(any));
  const std::uint64_t m = std::uint64_t{1} << h.lane;
  if (q.goal == Goal::Satisfy || q.goal == Goal::Falsify) {
    for (std::size_t u = 0; u < N; ++u) {
      const std::uint64_t w = q.goal == Goal::Satisfy ? S[q.x][u] : ~S[q.x][u];
      if (w & m) {
        h.u = u;
        break;
      }
    }
  } else {
    for (std::size_t e = 0; e < N * N; ++e)
      if (bad_pair(e) & m) {
        h.u = e / N;
        h.v = e % N;
        break;
      }
  }
  return h;
}

template <std::size_t N>
std::optional<Hit> scan_range(const Space& s, const Compiled& c, const Query& q, std::uint64_t from,
                              std::uint64_t to, const std::atomic<std::uint64_t>* best) {
  std::vector<Set> pv, S(c.sets);
  std::vector<Rel> rv, R(c.rels);
  for (std::uint64_t b = from; b < to; ++b) {
    if (best && (b & 63) == 0 && best->load(std::memory_order_relaxed) < b) return std::nullopt;
    if (auto h = scan_batch<N>(s, c, q, b, pv, rv, S, R)) return h;
  }
  return std::nullopt;
}

std::optional<Hit> scan(const Space& s, const Compiled& c, const Query& q, std::uint64_t from,
                        std::uint64_t to, const std::atomic<std::uint64_t>* best) {
  switch (s.n) {
    case 1: return scan_range<1>(s, c, q, from, to, best);
    case 2: return scan_range<2>(s, c, q, from, to, best);
    case 3: return scan_range<3>(s, c, q, from, to, best);
    case 4: return scan_range<4>(s, c, q, from, to, best);
  }
  throw BudgetError("exhaustive search supports at most 4 worlds");
}

// First hit in batch order; parallel workers claim blocks in increasing order
// so the result does not depend on the worker count.
std::optional<Hit> search_space(const Space& s, const Compiled& c, const Query& q, unsigned jobs) {
  const std::uint64_t total = s.batches();
  if (jobs <= 1 || total < 1024) return scan(s, c, q, 0, total, nullptr);
  constexpr std::uint64_t kBlock = 256;
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> best{std::numeric_limits<std::uint64_t>::max()};
  std::mutex mu;
  std::optional<Hit> result;
  std::exception_ptr error;
  auto worker = [&] {
    try {
      for (;;) {
        const std::uint64_t from = next.fetch_add(kBlock);
        if (from >= total || from > best.load()) return;
        auto h = scan(s, c, q, from, std::min(total, from + kBlock), &best);
        if (h) {
          std::lock_guard<std::mutex> lock(mu);
          if (!result || h->batch < result->batch) result = h;
          std::uint64_t cur = best.load();
          while (h->batch < cur && !best.compare_exchange_weak(cur, h->batch)) {
          }
          return;
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return result;
}

Vocabulary effective_vocab(const SearchBudget& b, const Vocabulary& query) {
  return b.vocab.merged(query);
}

void check_budget(const SearchBudget& b, const Vocabulary& vocab) {
  if (b.max_worlds == 0) throw BudgetError("max_worlds must be positive");
  if (b.mode == SearchMode::Random) {
    if (b.max_worlds > kMaxWorlds) throw BudgetError("max_worlds exceeds 64");
    return;
  }
  if (b.max_worlds > kMaxN) throw BudgetError("exhaustive search supports at most 4 worlds");
  std::uint64_t total = 0;
  for (std::size_t n = 1; n <= b.max_worlds; ++n) {
    const std::size_t bits = vocab.props.size() * n + vocab.programs.size() * n * n;
    if (bits >= 62) throw BudgetError("structure space exceeds the ceiling");
    total += exhaustive_count(n, vocab);
    if (total > b.ceiling)
      throw BudgetError("structure space (" + std::to_string(total) + ") exceeds the ceiling (" +
                        std::to_string(b.ceiling) + ")");
  }
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Sample i depends only on (seed, i).
KripkeStructure random_sample(const SearchBudget& b, const Vocabulary& vocab, std::uint64_t i) {
  std::mt19937_64 rng(splitmix(b.seed ^ splitmix(i)));
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, b.max_worlds)(rng);
  std::bernoulli_distribution coin(0.35);
  std::vector<std::string> names;
  for (std::size_t w = 0; w < n; ++w) names.push_back("w" + std::to_string(w));
  KripkeStructure k(names, vocab);
  for (const auto& p : vocab.props)
    for (World w = 0; w < n; ++w)
      if (coin(rng)) k.set_true(p, w);
  for (const auto& a : vocab.programs)
    for (World u = 0; u < n; ++u)
      for (World v = 0; v < n; ++v)
        if (coin(rng)) k.add_edge(a, u, v);
  return k;
}

struct RandomHit {
  std::uint64_t index;
  KripkeStructure k;
  World u;
  World v;
};

template <class Probe>
std::optional<RandomHit> random_search(const SearchBudget& b, const Vocabulary& vocab, Probe probe) {
  const unsigned jobs = std::max(1u, b.jobs);
  std::atomic<std::uint64_t> best{std::numeric_limits<std::uint64_t>::max()};
  std::mutex mu;
  std::optional<RandomHit> result;
  std::exception_ptr error;
  auto worker = [&](unsigned id) {
    try {
      for (std::uint64_t i = id; i < b.samples && i < best.load(); i += jobs) {
        KripkeStructure k = random_sample(b, vocab, i);
        World u = 0, v = 0;
        if (probe(k, u, v)) {
          std::lock_guard<std::mutex> lock(mu);
          if (!result || i < result->index) result = RandomHit{i, std::move(k), u, v};
          if (i < best.load()) best.store(i);
          return;
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      error = std::current_exception();
    }
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker, i);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return result;
}

std::uint64_t examined_before(const Vocabulary& vocab, std::size_t n, std::uint64_t batch, unsigned lane) {
  std::uint64_t count = 0;
  for (std::size_t m = 1; m < n; ++m) count += exhaustive_count(m, vocab);
  return count + batch * 64 + lane + 1;
}

SearchOutcome formula_search(const Formula& f, const SearchBudget& b, bool satisfy) {
  const Vocabulary vocab = effective_vocab(b, symbols_of(f));
  check_budget(b, vocab);
  SearchOutcome out;
  out.bound = b.max_worlds;
  auto found = [&](KripkeStructure k, World u) {
    if (eval(k, u, f) != satisfy) throw std::logic_error("model search: witness failed re-verification");
    out.kind = satisfy ? OutcomeKind::ModelFound : OutcomeKind::Countermodel;
    out.structure = std::move(k);
    out.world = u;
    return out;
  };
  if (b.mode == SearchMode::Random) {
    auto hit = random_search(b, vocab, [&](const KripkeStructure& k, World& u, World&) {
      const Mask ext = Evaluator(k).extension(f);
      const Mask m = satisfy ? ext : (~ext & all_worlds(k.size()));
      if (!m) return false;
      u = static_cast<World>(std::countr_zero(m));
      return true;
    });
    if (hit) {
      out.examined = hit->index + 1;
      return found(std::move(hit->k), hit->u);
    }
    out.examined = b.samples;
  } else {
    for (std::size_t n = 1; n <= b.max_worlds; ++n) {
      Space s(n, vocab);
      Compiled c(s);
      Query q{satisfy ? Goal::Satisfy : Goal::Falsify, c.formula(f), 0};
      if (auto h = search_space(s, c, q, std::max(1u, b.jobs))) {
        out.examined = examined_before(vocab, n, h->batch, h->lane);
        return found(s.decode(h->batch, h->lane), h->u);
      }
      out.examined += s.structures();
    }
  }
  out.kind = satisfy ? OutcomeKind::NoModelUpTo : OutcomeKind::ValidUpTo;
  return out;
}

}  // namespace

std::uint64_t exhaustive_count(std::size_t n, const Vocabulary& vocab) {
  if (n == 0 || n > kMaxN) throw BudgetError("exhaustive search supports 1 to 4 worlds");
  return Space(n, vocab).structures();
}

SearchOutcome find_model(const Formula& f, const SearchBudget& b) { return formula_search(f, b, true); }

SearchOutcome check_validity(const Formula& f, const SearchBudget& b) { return formula_search(f, b, false); }

SearchOutcome check_program_judgement(const Program& left, const Program& right, JudgementKind kind,
                                      const SearchBudget& b) {
  Vocabulary query = symbols_of(left).merged(symbols_of(right));
  const Vocabulary vocab = effective_vocab(b, query);
  check_budget(b, vocab);
  SearchOutcome out;
  out.bound = b.max_worlds;
  auto violated = [&](const KripkeStructure& k, World& u, World& v) {
    Evaluator ev(k);
    const Relation l = ev.relation(left);
    const Relation r = ev.relation(right);
    for (World x = 0; x < k.size(); ++x)
      for (World y = 0; y < k.size(); ++y) {
        const bool bad = kind == JudgementKind::Implies ? (l.contains(x, y) && !r.contains(x, y))
                                                        : (l.contains(x, y) != r.contains(x, y));
        if (bad) {
          u = x;
          v = y;
          return true;
        }
      }
    return false;
  };
  auto found = [&](KripkeStructure k, World u, World v) {
    World x = 0, y = 0;
    if (!violated(k, x, y)) throw std::logic_error("model search: witness failed re-verification");
    out.kind = OutcomeKind::Countermodel;
    out.structure = std::move(k);
    out.world = u;
    out.pair = std::make_pair(u, v);
    return out;
  };
  if (b.mode == SearchMode::Random) {
    if (auto hit = random_search(b, vocab, violated)) {
      out.examined = hit->index + 1;
      return found(std::move(hit->k), hit->u, hit->v);
    }
    out.examined = b.samples;
  } else {
    for (std::size_t n = 1; n <= b.max_worlds; ++n) {
      Space s(n, vocab);
      Compiled c(s);
      Query q{kind == JudgementKind::Implies ? Goal::Include : Goal::Equal, c.program(left), c.program(right)};
      if (auto h = search_space(s, c, q, std::max(1u, b.jobs))) {
        out.examined = examined_before(vocab, n, h->batch, h->lane);
        return found(s.decode(h->batch, h->lane), h->u, h->v);
      }
      out.examined += s.structures();
    }
  }
  out.kind = OutcomeKind::ValidUpTo;
  return out;
}

std::pair<KripkeStructure, World> minimize_countermodel(const KripkeStructure& k, World u, const Formula& f) {
  if (u >= k.size()) throw std::invalid_argument("minimize_countermodel: world out of range");
  if (eval(k, u, f)) throw std::invalid_argument("minimize_countermodel: formula holds at the world");
  KripkeStructure cur = k;
  World at = u;
  bool changed = true;
  while (changed) {
    changed = false;
    for (World w = cur.size(); w-- > 0;) {
      if (w == at || cur.size() == 1) continue;
      std::vector<World> renumber;
      KripkeStructure smaller = cur.restrict_to(all_worlds(cur.size()) & ~bit(w), &renumber);
      if (!eval(smaller, renumber[at], f)) {
        at = renumber[at];
        cur = std::move(smaller);
        changed = true;
      }
    }
    for (const auto& [a, r] : std::map<std::string, Relation>(cur.all_edges())) {
      for (auto [x, y] : r.pairs()) {
        KripkeStructure trial = cur;
        Relation e = trial.edges(a);
        e.erase(x, y);
        trial.set_edges(a, e);
        if (!eval(trial, at, f)) {
          cur = std::move(trial);
          changed = true;
        }
      }
    }
    for (const auto& [p, m] : std::map<std::string, Mask>(cur.valuations())) {
      for (World w = 0; w < cur.size(); ++w) {
        if (!((m >> w) & 1U)) continue;
        KripkeStructure trial = cur;
        trial.set_valuation(p, trial.valuation(p) & ~bit(w));
        if (!eval(trial, at, f)) {
          cur = std::move(trial);
          changed = true;
        }
      }
    }
  }
  return {cur, at};
}

}  // namespace pdl
