#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "d2t/data/record.hpp"
#include "d2t/eval/relations.hpp"

namespace d2t::eval {

// Optimal-string-alignment Damerau-Levenshtein distance: insert, delete,
// substitute and adjacent transposition, each cost 1, no substring edited
// twice.
template <class T>
std::size_t damerau_levenshtein(const std::vector<T>& a, const std::vector<T>& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
      }
    }
  }
  return d[n][m];
}

struct RgResult {
  std::size_t count = 0;
  std::size_t supported = 0;
  double precision = 1.0;
  bool empty = true;  // nothing extracted; precision is 1.0 by convention
};
RgResult rg_metric(const RelationSet& candidate, const std::vector<data::Record>& table);

struct CsResult {
  double precision = 0.0;
  double recall = 0.0;
};
// Set-based precision/recall over distinct triples. An empty side scores 1
// when the other side is also empty, else 0.
CsResult cs_metric(const RelationSet& candidate, const RelationSet& gold);

// 100 * (1 - DLD / max(|c|, |g|, 1)).
double co_metric(const RelationSet& candidate, const RelationSet& gold);

// Corpus BLEU-4: clipped n-gram precisions with uniform weights and the
// brevity penalty exp(1 - r/c) when c < r. Any n-gram order with zero
// matches (or no candidate n-grams) gives 0.
double bleu(const std::vector<std::vector<std::string>>& candidates,
            const std::vector<std::vector<std::string>>& references);

struct EvalReport {
  std::size_t summaries = 0;
  double rg_count = 0.0;      // mean relations per summary
  double rg_precision = 1.0;  // micro-averaged over the corpus
  bool rg_empty = true;
  double cs_precision = 0.0;  // macro-averaged per summary
  double cs_recall = 0.0;
  double co = 0.0;  // macro-averaged per summary, in [0, 100]
  double bleu = 0.0;

  std::string to_json() const;
};

EvalReport evaluate_corpus(const std::vector<std::vector<std::string>>& candidates,
                           const std::vector<std::vector<std::string>>& golds,
                           const std::vector<std::vector<data::Record>>& tables);

// Aligned text table: one header row plus one row per named report, columns
// RG#, RG P%, CS P%, CS R%, CO, BLEU.
std::string format_table(const std::vector<std::pair<std::string, EvalReport>>& rows);

}  // namespace d2t::eval
