#include "d2t/eval/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "d2t/errors.hpp"
#include "json.hpp"

namespace d2t::eval {

RgResult rg_metric(const RelationSet& candidate, const std::vector<data::Record>& table) {
  RgResult r;
  r.count = candidate.size();
  for (const Relation& rel : candidate) r.supported += supported(rel, table) ? 1 : 0;
  r.empty = r.count == 0;
  r.precision = r.empty ? 1.0 : static_cast<double>(r.supported) / static_cast<double>(r.count);
  return r;
}

CsResult cs_metric(const RelationSet& candidate, const RelationSet& gold) {
  const std::set<Relation> c(candidate.begin(), candidate.end());
  const std::set<Relation> g(gold.begin(), gold.end());
  std::size_t common = 0;
  for (const Relation& r : c) common += g.count(r);
  auto ratio = [&](std::size_t denom, bool other_empty) {
    if (denom == 0) return other_empty ? 1.0 : 0.0;
    return static_cast<double>(common) / static_cast<double>(denom);
  };
  return {ratio(c.size(), g.empty()), ratio(g.size(), c.empty())};
}

double co_metric(const RelationSet& candidate, const RelationSet& gold) {
  const std::size_t longest = std::max({candidate.size(), gold.size(), std::size_t{1}});
  const double d = static_cast<double>(damerau_levenshtein(candidate, gold));
  return 100.0 * (1.0 - d / static_cast<double>(longest));
}

double bleu(const std::vector<std::vector<std::string>>& candidates,
            const std::vector<std::vector<std::string>>& references) {
  if (candidates.size() != references.size()) {
    throw UsageError("bleu: candidate and reference counts differ");
  }
  if (candidates.empty()) throw UsageError("bleu: empty corpus");
  constexpr std::size_t kOrder = 4;
  std::size_t matches[kOrder] = {}, totals[kOrder] = {};
  std::size_t cand_len = 0, ref_len = 0;
  for (std::size_t s = 0; s < candidates.size(); ++s) {
    const auto& c = candidates[s];
    const auto& r = references[s];
    cand_len += c.size();
    ref_len += r.size();
    for (std::size_t n = 1; n <= kOrder; ++n) {
      std::map<std::vector<std::string>, std::size_t> ref_counts, cand_counts;
      for (std::size_t i = 0; i + n <= r.size(); ++i) {
        ++ref_counts[{r.begin() + i, r.begin() + i + n}];
      }
      for (std::size_t i = 0; i + n <= c.size(); ++i) {
        ++cand_counts[{c.begin() + i, c.begin() + i + n}];
      }
      for (const auto& [gram, count] : cand_counts) {
        auto it = ref_counts.find(gram);
        matches[n - 1] += it == ref_counts.end() ? 0 : std::min(count, it->second);
        totals[n - 1] += count;
      }
    }
  }
  double log_sum = 0.0;
  for (std::size_t n = 0; n < kOrder; ++n) {
    if (matches[n] == 0 || totals[n] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matches[n]) / static_cast<double>(totals[n]));
  }
  const double bp =
      cand_len < ref_len
          ? std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len))
          : 1.0;
  return 100.0 * bp * std::exp(log_sum / kOrder);
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["summaries"] = summaries;
  j["rg_count"] = rg_count;
  j["rg_precision"] = rg_precision;
  j["rg_empty"] = rg_empty;
  j["cs_precision"] = cs_precision;
  j["cs_recall"] = cs_recall;
  j["co"] = co;
  j["bleu"] = bleu;
  return j.dump(2);
}

EvalReport evaluate_corpus(const std::vector<std::vector<std::string>>& candidates,
                           const std::vector<std::vector<std::string>>& golds,
                           const std::vector<std::vector<data::Record>>& tables) {
  if (candidates.size() != golds.size() || candidates.size() != tables.size()) {
    throw UsageError("evaluate: candidate, gold and table counts differ");
  }
  EvalReport rep;
  rep.summaries = candidates.size();
  if (rep.summaries == 0) return rep;
  std::size_t extracted = 0, supported_total = 0;
  double cs_p = 0.0, cs_r = 0.0, co = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const RelationSet c = extract_relations(candidates[i], tables[i]);
    const RelationSet g = extract_relations(golds[i], tables[i]);
    const RgResult rg = rg_metric(c, tables[i]);
    extracted += rg.count;
    supported_total += rg.supported;
    const CsResult cs = cs_metric(c, g);
    cs_p += cs.precision;
    cs_r += cs.recall;
    co += co_metric(c, g);
  }
  const double n = static_cast<double>(rep.summaries);
  rep.rg_count = static_cast<double>(extracted) / n;
  rep.rg_empty = extracted == 0;
  rep.rg_precision =
      rep.rg_empty ? 1.0 : static_cast<double>(supported_total) / static_cast<double>(extracted);
  rep.cs_precision = cs_p / n;
  rep.cs_recall = cs_r / n;
  rep.co = co / n;
  rep.bleu = bleu(candidates, golds);
  return rep;
}

std::string format_table(const std::vector<std::pair<std::string, EvalReport>>& rows) {
  std::size_t width = 6;
  for (const auto& [name, r] : rows) width = std::max(width, name.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %8s %8s %8s %8s %8s %8s\n", static_cast<int>(width),
                "system", "RG#", "RG P%", "CS P%", "CS R%", "CO", "BLEU");
  out += buf;
  for (const auto& [name, r] : rows) {
    std::snprintf(buf, sizeof buf, "%-*s %8.2f %8.2f %8.2f %8.2f %8.2f %8.2f\n",
                  static_cast<int>(width), name.c_str(), r.rg_count, 100.0 * r.rg_precision,
                  100.0 * r.cs_precision, 100.0 * r.cs_recall, r.co, r.bleu);
    out += buf;
  }
  return out;
}

}  // namespace d2t::eval
