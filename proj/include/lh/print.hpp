#pragma once

#include <string>

#include "lh/syntax.hpp"

namespace lh {

// Concrete syntax. Source forms reparse to alpha-equivalent terms; runtime
// forms use the `check<...>`, `stack<...>` and `blame l` sigils, which the
// parser rejects.
std::string print(const Term& e);
std::string print(const TermPtr& e);
std::string print(const Type& t);
std::string print(const TypePtr& t);
std::string print(const Annotation& a);
std::string print(const Coercion& c);
std::string print(const RefList& r);
std::string print(const Label& l);
std::string print(Status s);

// Alpha-normal text of a refinement predicate whose binder is `binder`.
std::string canonical_pred_text(const Term& pred, const std::string& binder);

}  // namespace lh
