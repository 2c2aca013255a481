#include "d2t/eval/relations.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "d2t/data/lexicon.hpp"
#include "d2t/data/tokenize.hpp"

namespace d2t::eval {
namespace {

struct Mention {
  std::size_t begin;
  std::size_t end;
  std::string entity;
};

class EntityIndex {
 public:
  explicit EntityIndex(const std::vector<data::Record>& table) {
    std::set<std::string> names;
    for (const data::Record& r : table) {
      names.insert(r.entity());
      types_[r.entity()].insert(r.type());
      by_value_[{r.entity(), r.value()}].insert(r.type());
    }
    std::map<std::string, std::set<std::string>> surname_owners;
    for (const std::string& name : names) {
      std::vector<std::string> tokens = data::split_whitespace(name);
      if (tokens.empty()) continue;
      surname_owners[tokens.back()].insert(name);
      full_.emplace_back(std::move(tokens), name);
    }
    // Longer names first; ties by name for a fixed order.
    std::sort(full_.begin(), full_.end(), [](const auto& a, const auto& b) {
      return a.first.size() != b.first.size() ? a.first.size() > b.first.size()
                                              : a.second < b.second;
    });
    for (const auto& [surname, owners] : surname_owners) {
      if (owners.size() == 1) surnames_.emplace(surname, *owners.begin());
    }
  }

  std::optional<Mention> match(const std::vector<std::string>& tokens, std::size_t i) const {
    for (const auto& [name_tokens, name] : full_) {
      if (i + name_tokens.size() > tokens.size()) continue;
      if (std::equal(name_tokens.begin(), name_tokens.end(), tokens.begin() + i)) {
        return Mention{i, i + name_tokens.size(), name};
      }
    }
    if (auto it = surnames_.find(tokens[i]); it != surnames_.end()) {
      return Mention{i, i + 1, it->second};
    }
    return std::nullopt;
  }

  std::optional<std::string> type_for(const std::string& entity, const std::string& value,
                                      const std::string& next_word) const {
    const std::vector<std::string>& candidates = data::keyword_types(next_word);
    if (!candidates.empty()) {
      auto it = types_.find(entity);
      for (const std::string& t : candidates) {
        if (it != types_.end() && it->second.count(t)) return t;
      }
      return candidates.front();
    }
    auto it = by_value_.find({entity, value});
    if (it != by_value_.end() && it->second.size() == 1) return *it->second.begin();
    return std::nullopt;
  }

 private:
  std::vector<std::pair<std::vector<std::string>, std::string>> full_;
  std::map<std::string, std::string> surnames_;
  std::map<std::string, std::set<std::string>> types_;
  std::map<std::pair<std::string, std::string>, std::set<std::string>> by_value_;
};

void extract_sentence(const std::vector<std::string>& s, const EntityIndex& index,
                      RelationSet& out) {
  std::vector<Mention> mentions;
  std::vector<bool> in_mention(s.size(), false);
  for (std::size_t i = 0; i < s.size();) {
    if (auto m = index.match(s, i)) {
      for (std::size_t k = m->begin; k < m->end; ++k) in_mention[k] = true;
      i = m->end;
      mentions.push_back(std::move(*m));
    } else {
      ++i;
    }
  }
  if (mentions.empty()) return;

  auto next_word = [&](std::size_t i) { return i + 1 < s.size() ? s[i + 1] : std::string(); };
  std::size_t m = 0;  // first mention starting after i
  for (std::size_t i = 0; i < s.size(); ++i) {
    while (m < mentions.size() && mentions[m].begin <= i) ++m;
    if (in_mention[i]) {
      if (m > 0 && mentions[m - 1].end == i + 1) {
        const std::string& event = data::event_type(next_word(i));
        if (!event.empty()) out.push_back({mentions[m - 1].entity, data::kNoValue, event});
      }
      continue;
    }
    if (!data::is_number_token(s[i])) continue;
    const Mention& owner = m > 0 ? mentions[m - 1] : mentions[m];
    if (auto type = index.type_for(owner.entity, s[i], next_word(i))) {
      out.push_back({owner.entity, s[i], *type});
    }
  }
}

}  // namespace

RelationSet extract_relations(const std::vector<std::string>& summary,
                              const std::vector<data::Record>& table) {
  const EntityIndex index(table);
  RelationSet out;
  std::vector<std::string> sentence;
  for (const std::string& tok : summary) {
    sentence.push_back(tok);
    if (data::is_sentence_end(tok)) {
      extract_sentence(sentence, index, out);
      sentence.clear();
    }
  }
  extract_sentence(sentence, index, out);
  return out;
}

bool supported(const Relation& relation, const std::vector<data::Record>& table) {
  return std::any_of(table.begin(), table.end(), [&](const data::Record& r) {
    return r.entity() == relation.entity && r.value() == relation.value &&
           r.type() == relation.type;
  });
}

}  // namespace d2t::eval
