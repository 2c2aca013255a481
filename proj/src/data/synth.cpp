#include "d2t/data/synth.hpp"

#include <algorithm>
#include <random>

#include "d2t/data/lexicon.hpp"
#include "d2t/errors.hpp"

namespace d2t::data {
namespace {

const std::vector<std::string> kFirstNames = {
    "Al",    "Ben",   "Carl",  "Dion",  "Evan",  "Fred",  "Gary",  "Hank",
    "Ivan",  "Jalen", "Kyle",  "Luis",  "Marc",  "Nate",  "Omar",  "Paul",
    "Quinn", "Ray",   "Sam",   "Tyler", "Victor", "Wade", "Xavier", "Zach"};

const std::vector<std::string> kSurnames = {
    "Abbott",  "Barnes",  "Collins", "Dawson",  "Ellis",   "Fowler",  "Grant",   "Hayes",
    "Irving",  "Jordan",  "Keller",  "Lowry",   "Mullins", "Nash",    "Oakley",  "Parker",
    "Quincy",  "Reed",    "Sutton",  "Tatum",   "Upton",   "Vance",   "Walton",  "Young",
    "Zeller",  "Bryant",  "Curry",   "Duncan",  "Embiid",  "Fisher",  "Gasol",   "Horford",
    "Iguodala", "Jokic",  "Kidd",    "Lillard", "Millsap", "Noah",    "Olynyk",  "Pierce",
    "Rondo",   "Smart",   "Thomas",  "Udoka",   "Vucevic", "Wall",    "Yates",   "Zubac"};

const std::vector<std::string> kNbaTeams = {
    "Hawks",   "Celtics",  "Nets",      "Hornets", "Bulls",    "Cavaliers", "Mavericks", "Nuggets",
    "Pistons", "Warriors", "Rockets",   "Pacers",  "Clippers", "Lakers",    "Grizzlies", "Heat"};

const std::vector<std::string> kMlbTeams = {
    "Orioles", "Royals",    "Yankees", "Tigers", "Twins", "Rangers", "Astros",  "Mariners",
    "Athletics", "Angels",  "Padres",  "Giants", "Dodgers", "Rockies", "Cubs", "Brewers"};

const std::vector<std::string> kNbaStats = {"PTS", "REB", "AST", "STL", "BLK", "TO", "PF", "MIN"};
const std::vector<std::string> kPitcherStats = {"IP", "P-H", "P-R", "P-BB", "P-SO"};
const std::vector<std::string> kBatterStats = {"AB", "R", "H", "RBI", "BB", "SO"};
const std::vector<std::string> kEvents = {"home-run-batter", "single-batter", "double-batter",
                                          "triple-batter", "walk-batter"};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  int uniform(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  template <class T>
  const T& pick(const std::vector<T>& pool) {
    return pool[static_cast<std::size_t>(uniform(0, static_cast<int>(pool.size()) - 1))];
  }
  template <class T>
  std::vector<T> sample(std::vector<T> pool, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = static_cast<std::size_t>(uniform(static_cast<int>(i),
                                                      static_cast<int>(pool.size()) - 1));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }

 private:
  std::mt19937_64 engine_;
};

struct Player {
  std::string first;
  std::string last;
  bool home = true;
  bool pitcher = false;
  std::vector<std::pair<std::string, int>> stats;

  std::string entity() const { return first + " " + last; }
  int stat(const std::string& type) const {
    for (const auto& [t, v] : stats) {
      if (t == type) return v;
    }
    return -1;
  }
};

struct Team {
  std::string name;
  bool home = true;
  std::vector<std::pair<std::string, int>> stats;
};

class Builder {
 public:
  Builder(const RecordSchema& schema) : schema_(schema) {}

  void add(const std::string& value, const std::string& entity, const std::string& type,
           bool home, const std::string& inning = kNoValue, const std::string& play = kNoValue) {
    Record r;
    r.features = {value, entity, type, home ? kHome : kAway};
    if (schema_.kind == SchemaKind::mlb6) {
      r.features.push_back(inning);
      r.features.push_back(play);
    }
    records.push_back(std::move(r));
  }
  void add_player(const Player& p) {
    add(p.first, p.entity(), "FIRST_NAME", p.home);
    add(p.last, p.entity(), "SECOND_NAME", p.home);
    for (const auto& [type, v] : p.stats) add(std::to_string(v), p.entity(), type, p.home);
  }
  void add_team(const Team& t) {
    add(t.name, t.name, "TEAM-NAME", t.home);
    for (const auto& [type, v] : t.stats) add(std::to_string(v), t.name, type, t.home);
  }

  std::vector<Record> records;

 private:
  RecordSchema schema_;
};

class Writer {
 public:
  void words(std::initializer_list<std::string> ws) {
    tokens.insert(tokens.end(), ws.begin(), ws.end());
  }
  // Full name on first mention, surname afterwards.
  void name(const Player& p) {
    if (std::find(mentioned_.begin(), mentioned_.end(), p.last) == mentioned_.end()) {
      mentioned_.push_back(p.last);
      words({p.first, p.last});
    } else {
      words({p.last});
    }
  }
  void stat(int value, const std::string& type) { words({std::to_string(value), stat_keyword(type)}); }

  std::vector<std::string> tokens;

 private:
  std::vector<std::string> mentioned_;
};

std::vector<Player> make_players(Rng& rng, std::size_t count) {
  const std::vector<std::string> last = rng.sample(kSurnames, count);
  std::vector<Player> players(count);
  for (std::size_t i = 0; i < count; ++i) {
    players[i].first = rng.pick(kFirstNames);
    players[i].last = last[i];
    players[i].home = i < (count + 1) / 2;
  }
  return players;
}

std::pair<int, int> distinct_pair(Rng& rng, int lo, int hi) {
  const int a = rng.uniform(lo, hi);
  int b = rng.uniform(lo, hi - 1);
  if (b >= a) ++b;
  return {a, b};
}

void opening(Writer& w, const Team& win, const Team& lose, const std::string& score_type) {
  auto score = [&](const Team& t) {
    for (const auto& [type, v] : t.stats) {
      if (type == score_type) return v;
    }
    return 0;
  };
  w.words({"The", win.name, "("});
  w.stat(score(win), score_type);
  w.words({")", "defeated", "the", lose.name, "("});
  w.stat(score(lose), score_type);
  w.words({")", "."});
}

GameInstance nba_game(Rng& rng, const SynthOptions& o) {
  const std::vector<std::string> teams = rng.sample(kNbaTeams, 2);
  const auto [home_pts, away_pts] = distinct_pair(rng, 80, 130);
  Team home{teams[0], true, {{"TEAM-PTS", home_pts}}};
  Team away{teams[1], false, {{"TEAM-PTS", away_pts}}};
  for (Team* t : {&home, &away}) {
    t->stats.emplace_back("TEAM-WINS", rng.uniform(0, 40));
    t->stats.emplace_back("TEAM-LOSSES", rng.uniform(0, 40));
  }

  const std::size_t n_types = std::clamp<std::size_t>(o.n_types, 1, kNbaStats.size());
  std::vector<Player> players = make_players(rng, o.n_entities - 2);
  for (Player& p : players) {
    for (std::size_t i = 0; i < n_types; ++i) {
      const std::string& type = kNbaStats[i];
      int v = 0;
      if (type == "PTS") v = rng.uniform(0, 32);
      else if (type == "REB") v = rng.uniform(0, 14);
      else if (type == "AST") v = rng.uniform(0, 12);
      else if (type == "MIN") v = rng.uniform(8, 42);
      else v = rng.uniform(0, 6);
      p.stats.emplace_back(type, v);
    }
  }

  Builder b(o.schema);
  for (bool side : {true, false}) {
    for (const Player& p : players) {
      if (p.home == side) b.add_player(p);
    }
    b.add_team(side ? home : away);
  }

  Writer w;
  const bool home_won = home_pts > away_pts;
  opening(w, home_won ? home : away, home_won ? away : home, "TEAM-PTS");
  for (bool side : {true, false}) {
    for (const Player& p : players) {
      if (p.home != side || p.stat("PTS") < o.mention_threshold) continue;
      w.name(p);
      w.words({"scored"});
      w.stat(p.stat("PTS"), "PTS");
      w.words({"."});
      std::vector<std::pair<std::string, int>> extra;
      for (const auto& [type, v] : p.stats) {
        if (type != "PTS" && type != "MIN" && v >= 5 && extra.size() < 2) extra.emplace_back(type, v);
      }
      if (extra.empty()) continue;
      w.name(p);
      w.words({"added"});
      for (std::size_t i = 0; i < extra.size(); ++i) {
        if (i > 0) w.words({"and"});
        w.stat(extra[i].second, extra[i].first);
      }
      w.words({"."});
    }
  }
  return GameInstance{"", std::move(b.records), std::move(w.tokens)};
}

GameInstance mlb_game(Rng& rng, const SynthOptions& o) {
  const std::vector<std::string> teams = rng.sample(kMlbTeams, 2);
  const auto [home_runs, away_runs] = distinct_pair(rng, 0, 12);
  Team home{teams[0], true, {{"TEAM-R", home_runs}}};
  Team away{teams[1], false, {{"TEAM-R", away_runs}}};
  for (Team* t : {&home, &away}) {
    t->stats.emplace_back("TEAM-H", rng.uniform(2, 15));
    t->stats.emplace_back("TEAM-E", rng.uniform(0, 3));
  }

  const std::size_t n_pitch = std::clamp<std::size_t>(o.n_types, 3, kPitcherStats.size());
  const std::size_t n_bat = std::clamp<std::size_t>(o.n_types, 4, kBatterStats.size());
  std::vector<Player> players = make_players(rng, o.n_entities - 2);
  bool seen_home = false, seen_away = false;
  for (Player& p : players) {
    bool& seen = p.home ? seen_home : seen_away;
    p.pitcher = !seen;
    seen = true;
    if (p.pitcher) {
      for (std::size_t i = 0; i < n_pitch; ++i) {
        const std::string& type = kPitcherStats[i];
        const int v = type == "IP"     ? rng.uniform(1, 9)
                      : type == "P-H"  ? rng.uniform(0, 10)
                      : type == "P-R"  ? rng.uniform(0, 7)
                      : type == "P-SO" ? rng.uniform(0, 12)
                                       : rng.uniform(0, 5);
        p.stats.emplace_back(type, v);
      }
    } else {
      const int ab = rng.uniform(2, 5);
      for (std::size_t i = 0; i < n_bat; ++i) {
        const std::string& type = kBatterStats[i];
        const int v = type == "AB"    ? ab
                      : type == "H"   ? rng.uniform(0, std::min(ab, 4))
                      : type == "RBI" ? rng.uniform(0, 4)
                                      : rng.uniform(0, 3);
        p.stats.emplace_back(type, v);
      }
    }
  }

  Builder b(o.schema);
  for (bool side : {true, false}) {
    for (const Player& p : players) {
      if (p.home == side) b.add_player(p);
    }
    b.add_team(side ? home : away);
  }

  struct Play {
    int inning;
    const Player* batter;
    std::string type;
  };
  std::vector<const Player*> batters;
  for (const Player& p : players) {
    if (!p.pitcher) batters.push_back(&p);
  }
  std::vector<Play> plays;
  if (!batters.empty()) {
    const int n_plays = rng.uniform(2, 4);
    for (int i = 0; i < n_plays; ++i) {
      plays.push_back({rng.uniform(1, 9), rng.pick(batters), rng.pick(kEvents)});
    }
    std::stable_sort(plays.begin(), plays.end(),
                     [](const Play& a, const Play& c) { return a.inning < c.inning; });
  }
  for (std::size_t i = 0; i < plays.size(); ++i) {
    b.add(kNoValue, plays[i].batter->entity(), plays[i].type, plays[i].batter->home,
          std::to_string(plays[i].inning), std::to_string(i));
  }

  Writer w;
  const bool home_won = home_runs > away_runs;
  opening(w, home_won ? home : away, home_won ? away : home, "TEAM-R");
  for (const Player& p : players) {
    if (!p.pitcher || p.home != home_won) continue;
    w.name(p);
    w.words({"pitched"});
    w.stat(p.stat("IP"), "IP");
    w.words({",", "allowing"});
    w.stat(p.stat("P-H"), "P-H");
    w.words({"and"});
    w.stat(p.stat("P-R"), "P-R");
    w.words({"."});
  }
  for (const Player* p : batters) {
    if (p->stat("H") < 2) continue;
    w.name(*p);
    w.words({"had"});
    w.stat(p->stat("H"), "H");
    w.words({"and"});
    w.stat(p->stat("RBI"), "RBI");
    w.words({"."});
  }
  for (const Play& play : plays) {
    w.name(*play.batter);
    w.words({event_word(play.type), "in", "the", ordinal_word(play.inning), "inning", "."});
  }
  return GameInstance{"", std::move(b.records), std::move(w.tokens)};
}

}  // namespace

Dataset synth_games(const SynthOptions& o) {
  if (o.n_entities < 2) throw UsageError("synth: n_entities must be >= 2");
  if (o.n_types < 2) throw UsageError("synth: n_types must be >= 2");
  if (o.n_entities - 2 > kSurnames.size()) {
    throw UsageError("synth: at most " + std::to_string(kSurnames.size() + 2) + " entities");
  }
  Rng rng(o.seed);
  Dataset d;
  d.schema = o.schema;
  std::size_t next = 0;
  for (auto [split, count] : {std::pair{&d.train, o.n_games}, std::pair{&d.dev, o.n_dev},
                              std::pair{&d.test, o.n_test}}) {
    for (std::size_t i = 0; i < count; ++i) {
      GameInstance g = o.schema.kind == SchemaKind::rw4 ? nba_game(rng, o) : mlb_game(rng, o);
      g.id = "synth-" + std::to_string(o.seed) + "-" + std::to_string(next++);
      validate_instance(g, o.schema);
      split->push_back(std::move(g));
    }
  }
  return d;
}

Dataset synth_games(std::uint64_t seed, std::size_t n_games, std::size_t n_entities,
                    std::size_t n_types, RecordSchema schema) {
  SynthOptions o;
  o.seed = seed;
  o.n_games = n_games;
  o.n_entities = n_entities;
  o.n_types = n_types;
  o.schema = schema;
  return synth_games(o);
}

}  // namespace d2t::data
