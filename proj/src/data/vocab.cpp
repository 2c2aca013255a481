#include "d2t/data/vocab.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "d2t/errors.hpp"

namespace d2t::data {

Vocabulary::Vocabulary() {
  push("<pad>", 0);
  push("<unk>", 0);
  push("<s>", 0);
  push("</s>", 0);
}

void Vocabulary::push(const std::string& token, std::size_t count) {
  if (!ids_.emplace(token, tokens_.size()).second) {
    throw DataError("duplicate vocabulary token: " + token);
  }
  tokens_.push_back(token);
  counts_.push_back(count);
}

Vocabulary Vocabulary::from_counts(const std::unordered_map<std::string, std::size_t>& counts,
                                   std::size_t min_count) {
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [tok, c] : counts) {
    if (c >= min_count) kept.emplace_back(tok, c);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  Vocabulary v;
  for (const auto& [tok, c] : kept) {
    if (!v.contains(tok)) v.push(tok, c);
  }
  return v;
}

std::size_t Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

void Vocabulary::write_tsv(std::ostream& out) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out << tokens_[i] << '\t' << i << '\t' << counts_[i] << '\n';
  }
}

Vocabulary Vocabulary::read_tsv(std::istream& in) {
  Vocabulary v;
  std::string line;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) {
      throw DataError("vocabulary TSV: malformed line '" + line + "'");
    }
    const std::string token = line.substr(0, t1);
    const std::size_t id = std::stoul(line.substr(t1 + 1, t2 - t1 - 1));
    const std::size_t count = std::stoul(line.substr(t2 + 1));
    if (id != expected) throw DataError("vocabulary TSV: ids must be dense and ordered");
    ++expected;
    if (id < kReserved) {
      if (v.tokens_[id] != token) throw DataError("vocabulary TSV: reserved id mismatch");
      continue;
    }
    v.push(token, count);
  }
  return v;
}

Vocabularies build_vocab(const Dataset& dataset, std::size_t min_count) {
  const std::size_t roles = dataset.schema.feature_count();
  std::unordered_map<std::string, std::size_t> words;
  std::vector<std::unordered_map<std::string, std::size_t>> role_counts(roles);
  for (const GameInstance& g : dataset.train) {
    for (const std::string& tok : g.summary) ++words[tok];
    for (const Record& r : g.records) {
      for (std::size_t l = 0; l < roles && l < r.features.size(); ++l) {
        ++role_counts[l][r.features[l]];
      }
    }
  }
  Vocabularies out;
  out.words = Vocabulary::from_counts(words, min_count);
  for (const auto& counts : role_counts) {
    out.roles.push_back(Vocabulary::from_counts(counts, min_count));
  }
  return out;
}

}  // namespace d2t::data
