#include "d2t/templ/template.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>

#include "d2t/data/lexicon.hpp"
#include "d2t/errors.hpp"

namespace d2t::templ {

namespace detail {
extern const char* const kBuiltinFrames;
}

const Frames& Frames::builtin() {
  static const Frames frames = [] {
    std::istringstream in(detail::kBuiltinFrames);
    return parse(in);
  }();
  return frames;
}

Frames Frames::parse(std::istream& in) {
  Frames frames;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::istringstream words(line);
    std::string key;
    if (!(words >> key) || key[0] == '#') continue;
    std::string token, frame;
    while (words >> token) {
      if ((token.front() == '{') != (token.back() == '}'))
        throw DataError("frames line " + std::to_string(number) + ": malformed slot '" + token + "'");
      frame += frame.empty() ? token : " " + token;
    }
    if (frame.empty()) throw DataError("frames line " + std::to_string(number) + ": missing frame");
    frames.entries_.emplace_back(key, frame);
  }
  return frames;
}

std::vector<std::string> Frames::lookup(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& [k, frame] : entries_)
    if (k == key) out.push_back(frame);
  return out;
}

namespace {

std::vector<std::string> split(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::optional<double> number(const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

struct Entity {
  std::string name;
  std::string side;  // home/away feature of its first record
  std::map<std::string, std::string> values;
  bool team = false;

  const std::string* value(const std::string& type) const {
    auto it = values.find(type);
    if (it == values.end() || it->second == data::kNoValue) return nullptr;
    return &it->second;
  }
};

struct Play {
  int inning;
  int index;
  std::string entity;
  std::string type;
};

struct Slots {
  const Entity* winner = nullptr;
  const Entity* loser = nullptr;
  const Entity* player = nullptr;
  const Play* play = nullptr;
};

std::optional<std::vector<std::string>> resolve(const std::string& slot, const Slots& s) {
  auto of = [](const Entity* e, const std::string& type) -> std::optional<std::vector<std::string>> {
    if (!e) return std::nullopt;
    if (type.empty()) return split(e->name);
    const std::string* v = e->value(type);
    if (!v) return std::nullopt;
    return std::vector<std::string>{*v};
  };
  if (slot == "event") {
    if (!s.play) return std::nullopt;
    return std::vector<std::string>{data::event_word(s.play->type)};
  }
  if (slot == "inning") {
    if (!s.play) return std::nullopt;
    return std::vector<std::string>{data::ordinal_word(s.play->inning)};
  }
  for (const auto& [role, entity] :
       {std::pair{std::string("winner"), s.winner}, std::pair{std::string("loser"), s.loser}}) {
    if (slot == role) return of(entity, "");
    if (slot.rfind(role + ".", 0) == 0) return of(entity, slot.substr(role.size() + 1));
  }
  if (slot == "player") return of(s.player, "");
  return of(s.player, slot);
}

std::optional<std::vector<std::string>> fill(const std::string& frame, const Slots& s) {
  std::vector<std::string> out;
  for (const std::string& token : split(frame)) {
    if (token.size() >= 2 && token.front() == '{' && token.back() == '}') {
      auto words = resolve(token.substr(1, token.size() - 2), s);
      if (!words) return std::nullopt;
      out.insert(out.end(), words->begin(), words->end());
    } else {
      out.push_back(token);
    }
  }
  return out;
}

// Appends frames under key: the first that resolves, or all of them for a
// '*' key.
void emit(const Frames& frames, const std::string& key, const Slots& s,
          std::vector<std::string>& out) {
  for (const std::string& frame : frames.lookup(key)) {
    if (auto words = fill(frame, s)) {
      out.insert(out.end(), words->begin(), words->end());
      if (key.back() != '*') return;
    }
  }
}

}  // namespace

std::vector<std::string> generate_template(const std::vector<data::Record>& table,
                                           const data::RecordSchema& schema,
                                           const TemplateOptions& options, const Frames& frames) {
  std::vector<Entity> entities;
  std::map<std::string, std::size_t> position;
  std::vector<Play> plays;
  for (const data::Record& r : table) {
    if (r.features.size() != schema.feature_count())
      throw DataError("template: record arity does not match schema " + schema.name());
    auto [it, fresh] = position.emplace(r.entity(), entities.size());
    if (fresh) entities.push_back({r.entity(), r.home_away(), {}, false});
    Entity& e = entities[it->second];
    e.values.emplace(r.type(), r.value());
    if (r.type().rfind("TEAM-", 0) == 0) e.team = true;
    if (schema.kind == data::SchemaKind::mlb6 && r.value() == data::kNoValue &&
        !data::event_word(r.type()).empty()) {
      const auto inning = number(r.features[data::kInning]);
      const auto index = number(r.features[data::kPlayIndex]);
      plays.push_back({inning ? static_cast<int>(*inning) : 0, index ? static_cast<int>(*index) : 0,
                       r.entity(), r.type()});
    }
  }

  std::vector<const Entity*> teams;
  for (const Entity& e : entities)
    if (e.team) teams.push_back(&e);
  if (teams.size() < 2) throw DataError("template: table needs two team entities");
  // Prefer one home and one away team when more than two are present.
  auto away = std::find_if(teams.begin() + 1, teams.end(),
                           [&](const Entity* t) { return t->side != teams[0]->side; });
  const Entity* first = teams[0];
  const Entity* second = away != teams.end() ? *away : teams[1];

  const std::string score = schema.kind == data::SchemaKind::rw4 ? "TEAM-PTS" : "TEAM-R";
  const Entity* winner = first;
  const Entity* loser = second;
  {
    const std::string* a = first->value(score);
    const std::string* b = second->value(score);
    const auto sa = a ? number(*a) : std::nullopt;
    const auto sb = b ? number(*b) : std::nullopt;
    if (!sa || !sb) throw DataError("template: team entity lacks a numeric " + score + " record");
    if (*sb > *sa) std::swap(winner, loser);
  }

  std::vector<std::string> out;
  const std::string prefix = schema.name() + ".";
  emit(frames, prefix + "opening", {winner, loser, nullptr, nullptr}, out);

  if (schema.kind == data::SchemaKind::rw4) {
    std::vector<std::pair<double, const Entity*>> ranked;
    for (const Entity& e : entities) {
      if (e.team) continue;
      const std::string* pts = e.value("PTS");
      if (auto v = pts ? number(*pts) : std::nullopt) ranked.emplace_back(*v, &e);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    if (ranked.size() > options.top_k) ranked.resize(options.top_k);
    for (const auto& [pts, player] : ranked) {
      const Slots s{winner, loser, player, nullptr};
      emit(frames, prefix + "player", s, out);
      emit(frames, prefix + "player*", s, out);
    }
    return out;
  }

  std::vector<const Entity*> pitchers;
  for (const Entity* side : {winner, loser})
    for (const Entity& e : entities)
      if (!e.team && e.side == side->side && e.value("IP")) pitchers.push_back(&e);
  for (const Entity* p : pitchers) emit(frames, prefix + "pitcher", {winner, loser, p, nullptr}, out);

  std::stable_sort(plays.begin(), plays.end(), [](const Play& a, const Play& b) {
    return a.inning != b.inning ? a.inning < b.inning : a.index < b.index;
  });
  for (const Play& play : plays)
    emit(frames, prefix + "play", {winner, loser, &entities[position.at(play.entity)], &play}, out);
  return out;
}

}  // namespace d2t::templ
