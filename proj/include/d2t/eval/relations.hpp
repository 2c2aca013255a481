#pragma once

#include <string>
#include <vector>

#include "d2t/data/record.hpp"

namespace d2t::eval {

// (entity, value, type); value is "-1" for valueless events.
struct Relation {
  std::string entity;
  std::string value;
  std::string type;
  auto operator<=>(const Relation&) const = default;
};

// Relations in textual order of their value (or event) token.
using RelationSet = std::vector<Relation>;

// Rule-based extraction over one summary, sentence by sentence:
//  - entity mentions: longest full entity-string token match, else a surname
//    (last token) owned by exactly one entity;
//  - an event verb right after a mention gives (entity, "-1", event type);
//  - each number pairs with the nearest preceding mention in the sentence,
//    else the nearest following one;
//  - the type comes from the stat word right after the number (choosing the
//    candidate the entity has in the table, else the first candidate); with no
//    stat word, the unique entity record with that value, else nothing.
// The result does not depend on the order of the table records.
RelationSet extract_relations(const std::vector<std::string>& summary,
                              const std::vector<data::Record>& table);

// True if some record has this entity, value and type.
bool supported(const Relation& relation, const std::vector<data::Record>& table);

}  // namespace d2t::eval
