#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "d2t/data/record.hpp"

namespace d2t::data {

// Token <-> id bijection. Ids 0..3 are reserved for padding, unknown,
// begin and end; the remaining ids follow (count desc, token asc).
class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr std::size_t kBegin = 2;
  static constexpr std::size_t kEnd = 3;
  static constexpr std::size_t kReserved = 4;

  Vocabulary();

  // Builds from token counts keeping tokens with count >= min_count.
  static Vocabulary from_counts(const std::unordered_map<std::string, std::size_t>& counts,
                                std::size_t min_count);

  std::size_t size() const { return tokens_.size(); }
  bool contains(const std::string& token) const { return ids_.count(token) > 0; }
  // Unknown id for out-of-vocabulary tokens.
  std::size_t id(const std::string& token) const;
  const std::string& token(std::size_t id) const { return tokens_.at(id); }
  std::size_t count(std::size_t id) const { return counts_.at(id); }

  // TSV rows: token \t id \t count.
  void write_tsv(std::ostream& out) const;
  static Vocabulary read_tsv(std::istream& in);

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  void push(const std::string& token, std::size_t count);

  std::vector<std::string> tokens_;
  std::vector<std::size_t> counts_;
  std::unordered_map<std::string, std::size_t> ids_;
};

// Summary vocabulary plus one vocabulary per record feature role.
struct Vocabularies {
  Vocabulary words;
  std::vector<Vocabulary> roles;
};

// Counts over the train split only.
Vocabularies build_vocab(const Dataset& dataset, std::size_t min_count);

}  // namespace d2t::data
