#include "quadcore/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "quadcore/rng.hpp"

namespace quadcore {

NoiseModel NoiseModel::probabilistic(double phi) {
  if (!(phi >= 0.0 && phi <= 0.25)) throw Error("phi must be in [0, 1/4]");
  NoiseModel m;
  m.kind = Kind::probabilistic;
  m.phi = phi;
  return m;
}

NoiseModel NoiseModel::adversarial(double mu, Policy policy) {
  if (!(mu >= 0.0)) throw Error("mu must be >= 0");
  NoiseModel m;
  m.kind = Kind::adversarial;
  m.mu = mu;
  m.policy = policy;
  return m;
}

std::string NoiseModel::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::perfect: os << "perfect"; break;
    case Kind::probabilistic: os << "probabilistic(phi=" << phi << ")"; break;
    case Kind::adversarial: {
      const char* p = policy == Policy::constant_no ? "constant-no" : policy == Policy::constant_yes ? "constant-yes" : "key-parity";
      os << "adversarial(mu=" << mu << "," << p << ")";
      break;
    }
  }
  return os.str();
}

struct OracleSession::Stage {
  std::atomic<std::uint64_t> quad_total{0};
  std::atomic<std::uint64_t> strong_total{0};
  std::mutex key_mutex;
  std::vector<std::uint64_t> keys;
  std::size_t compacted = 0;  // keys[0, compacted) is sorted and unique

  void compact() {
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    compacted = keys.size();
  }
};

OracleSession::OracleSession(const MetricSpace& space, NoiseModel noise, std::uint64_t seed, bool track_keys)
    : space_(&space), noise_(noise), seed_(seed), track_keys_(track_keys) {
  if (noise_.kind == NoiseModel::Kind::probabilistic) {
    if (!(noise_.phi >= 0.0 && noise_.phi <= 0.25)) throw Error("phi must be in [0, 1/4]");
    threshold_ = static_cast<std::uint64_t>(std::ldexp(noise_.phi, 64));
  }
  set_stage("default");
}

OracleSession::~OracleSession() = default;

OracleSession::Stage& OracleSession::stage_for(const std::string& name) const {
  std::lock_guard lock(mutex_);
  auto& slot = stages_[name];
  if (!slot) slot = std::make_unique<Stage>();
  return *slot;
}

void OracleSession::set_stage(const std::string& stage) { current_.store(&stage_for(stage)); }

std::string OracleSession::stage() const {
  std::lock_guard lock(mutex_);
  const Stage* cur = current_.load();
  for (const auto& [name, st] : stages_)
    if (st.get() == cur) return name;
  return {};
}

std::uint64_t OracleSession::pair_key(const Edge& a, const Edge& b) {
  const auto lo = std::min(a.key(), b.key()), hi = std::max(a.key(), b.key());
  return splitmix64(splitmix64(lo) ^ (hi * 0x9e3779b97f4a7c15ULL));
}

bool OracleSession::in_band(double d1, double d2) const {
  if (d1 == 0.0 && d2 == 0.0) return true;
  if (d1 == 0.0 || d2 == 0.0) return false;
  const double r = d1 / d2;
  return r >= 1.0 / (1.0 + noise_.mu) && r <= 1.0 + noise_.mu;
}

Answer OracleSession::canonical_answer(const Edge& lo, const Edge& hi) const {
  const Answer truth = to_answer(space_->shorter(lo, hi));
  if (noise_.kind != NoiseModel::Kind::probabilistic || threshold_ == 0) return truth;
  const std::uint64_t h = splitmix64(seed_ ^ splitmix64(lo.key() ^ splitmix64(hi.key())));
  return h < threshold_ ? flip(truth) : truth;
}

Answer OracleSession::quad(const Edge& e1, const Edge& e2) {
  space_->check(e1.v());
  space_->check(e2.v());
  Stage* st = current_.load();
  st->quad_total.fetch_add(1, std::memory_order_relaxed);
  if (track_keys_) {
    std::lock_guard lock(st->key_mutex);
    st->keys.push_back(pair_key(e1, e2));
    if (st->keys.size() >= 2 * st->compacted + (1u << 20)) st->compact();
  }
  if (e1 == e2) return Answer::yes;

  const bool reversed = e2.key() < e1.key();
  const Edge& lo = reversed ? e2 : e1;
  const Edge& hi = reversed ? e1 : e2;

  if (noise_.kind == NoiseModel::Kind::adversarial) {
    const double d1 = space_->distance(e1), d2 = space_->distance(e2);
    if (!in_band(d1, d2)) return to_answer(space_->shorter(e1, e2));
    switch (noise_.policy) {
      case NoiseModel::Policy::constant_no: return Answer::no;
      case NoiseModel::Policy::constant_yes: return Answer::yes;
      case NoiseModel::Policy::key_parity: {
        const Answer a = to_answer((splitmix64(seed_ ^ pair_key(lo, hi)) & 1u) != 0);
        return reversed ? flip(a) : a;
      }
    }
  }
  const Answer a = canonical_answer(lo, hi);
  return reversed ? flip(a) : a;
}

double OracleSession::strong_distance(VertexId u, VertexId v) {
  current_.load()->strong_total.fetch_add(1, std::memory_order_relaxed);
  return space_->distance(u, v);
}

StageCounts OracleSession::stage_counts(const std::string& stage) const {
  StageCounts c;
  std::lock_guard lock(mutex_);
  auto it = stages_.find(stage);
  if (it == stages_.end()) return c;
  Stage& st = *it->second;
  c.quad_total = st.quad_total.load();
  c.strong_total = st.strong_total.load();
  if (track_keys_) {
    std::lock_guard klock(st.key_mutex);
    st.compact();
    c.quad_distinct = st.keys.size();
  }
  return c;
}

StageCounts OracleSession::totals() const {
  StageCounts c;
  std::vector<std::uint64_t> all;
  std::lock_guard lock(mutex_);
  for (const auto& [name, st] : stages_) {
    c.quad_total += st->quad_total.load();
    c.strong_total += st->strong_total.load();
    if (track_keys_) {
      std::lock_guard klock(st->key_mutex);
      st->compact();
      all.insert(all.end(), st->keys.begin(), st->keys.end());
    }
  }
  std::sort(all.begin(), all.end());
  c.quad_distinct = static_cast<std::uint64_t>(std::unique(all.begin(), all.end()) - all.begin());
  return c;
}

std::uint64_t OracleSession::quad_count() const {
  std::lock_guard lock(mutex_);
  std::uint64_t total = 0;
  for (const auto& [name, st] : stages_) total += st->quad_total.load();
  return total;
}

std::vector<std::string> OracleSession::stages() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> names;
  for (const auto& [name, st] : stages_)
    if (st->quad_total.load() || st->strong_total.load()) names.push_back(name);
  return names;
}

std::vector<std::uint64_t> OracleSession::stage_keys(const std::string& stage) const {
  std::lock_guard lock(mutex_);
  auto it = stages_.find(stage);
  if (it == stages_.end()) return {};
  std::lock_guard klock(it->second->key_mutex);
  it->second->compact();
  return it->second->keys;
}

void OracleSession::write_ledger(std::ostream& out) const {
  out << "stage,quad_total,quad_distinct,strong_total\n";
  for (const auto& name : stages()) {
    const auto c = stage_counts(name);
    out << name << ',' << c.quad_total << ',' << c.quad_distinct << ',' << c.strong_total << '\n';
  }
}

double OracleSession::empirical_error_rate(std::size_t trials, std::uint64_t seed) {
  if (trials == 0 || space_->size() < 3) return 0.0;
  StageGuard guard(*this, "diagnostic");
  auto rng = make_rng(seed, {0x6572});
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(space_->size() - 1));
  auto random_edge = [&] {
    VertexId a = pick(rng), b = pick(rng);
    while (b == a) b = pick(rng);
    return Edge(a, b);
  };
  std::size_t wrong = 0, done = 0, attempts = 0;
  while (done < trials && attempts < 100 * trials) {
    ++attempts;
    const Edge e1 = random_edge(), e2 = random_edge();
    const double d1 = space_->distance(e1), d2 = space_->distance(e2);
    if (d1 == d2) continue;
    ++done;
    if ((quad(e1, e2) == Answer::yes) != (d1 < d2)) ++wrong;
  }
  return done ? static_cast<double>(wrong) / static_cast<double>(done) : 0.0;
}

std::size_t key_overlap(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j])
      ++i;
    else if (b[j] < a[i])
      ++j;
    else {
      ++common;
      ++i;
      ++j;
    }
  }
  return common;
}

}  // namespace quadcore
