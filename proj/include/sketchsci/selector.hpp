#pragma once

#include "sketchsci/sketch.hpp"
#include "sketchsci/workbook.hpp"

#include <string>
#include <variant>
#include <vector>

namespace sketchsci::select {

struct Var {
    std::size_t id = 0;
    friend auto operator<=>(const Var&, const Var&) = default;
};

/// Identity of a table row; appears only in facts, never in induced queries.
struct RowId {
    std::size_t pred = 0;
    std::size_t row = 0;
    friend auto operator<=>(const RowId&, const RowId&) = default;
};

using Term = std::variant<CellValue, Var, RowId>;

/// args[0] is the row identifier, followed by one term per retained column.
struct Atom {
    std::size_t pred = 0;
    std::vector<Term> args;
    friend bool operator==(const Atom&, const Atom&) = default;
    friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct Query {
    std::vector<Atom> atoms;
    friend bool operator==(const Query&, const Query&) = default;
};

struct Predicate {
    std::string table;
    std::vector<std::size_t> columns; ///< retained column indices of the table
    std::vector<std::string> names;   ///< their header names
};

/// One atom per colored table, joined on foreign keys.
struct Template {
    std::vector<Predicate> predicates;
    Query query;
};

struct RelExample {
    Atom seed;
    std::vector<Atom> facts; ///< the seed plus every join partner; just the seed for negatives
};

struct Examples {
    std::vector<RelExample> positives;
    std::vector<RelExample> negatives;
    std::vector<std::string> warnings;
};

struct SelectionConfig {
    unsigned seed = 0;
    std::size_t pair_samples = 20;
    std::size_t max_atoms = 12;
};

/// Throws a schema error when the colored tables are not connected by
/// foreign keys, and a task-role error when nothing is colored positive.
Template build_template(const Workbook& workbook, const Sketch& sketch);

/// Every row of every template table as a ground atom.
std::vector<Atom> database_facts(const Workbook& workbook, const Template& tmpl);

Examples extend_examples(const Workbook& workbook, const Sketch& sketch, const Template& tmpl);

/// A ground example read as a query: facts with their row ids as variables.
Query as_query(const std::vector<Atom>& facts);

/// Plotkin lgg with one variable per (term, term) pair across the clause,
/// followed by theta-reduction and the atom cap.
Query lgg(const Query& a, const Query& b, std::size_t max_atoms = 12);

/// Is there a substitution of `general`'s variables mapping every atom onto
/// an atom of `specific`? Variables of `specific` are treated as constants.
bool subsumes(const Query& general, const Query& specific);

/// Drops atoms as long as the clause still maps into the remainder.
Query theta_reduce(Query query);

/// Does some substitution bind a `seed`-predicate atom of q to `seed` and
/// every other atom to an element of `facts`?
bool covers(const Query& q, const std::vector<Atom>& facts, const Atom& seed);

/// Every way of matching q's atoms against `facts`; each answer lists the
/// matched fact per atom.
std::vector<std::vector<Atom>> answers(const Query& q, const std::vector<Atom>& facts);

/// Alpha-equivalent queries canonicalize to equal values.
Query canonicalize(const Query& q, const Template& tmpl);

/// `?- sales(I0,Type,City,...,'YES'), provider(I1,...).`
std::string to_prolog(const Query& q, const Template& tmpl);

/// GOLEM-style covering over lgg. Throws an inconsistency error when a
/// positive seed equals a negative tuple.
std::vector<Query> induce_queries(const std::vector<RelExample>& positives, const std::vector<RelExample>& negatives,
    const std::vector<Atom>& database, const Template& tmpl, const SelectionConfig& cfg = {});

/// Colors the retained columns of every row taking part in an answer;
/// user negatives are kept, new positive cells are machine_generated.
Sketch apply_selection(
    const std::vector<Query>& queries, const Workbook& workbook, const Template& tmpl, const Sketch& original);

struct SelectionResult {
    Template tmpl;
    std::vector<Query> queries;
    Sketch sketch;
    std::vector<std::string> warnings;
};

SelectionResult run_selection(const Workbook& workbook, const Sketch& sketch, const SelectionConfig& cfg = {});

} // namespace sketchsci::select
