#include "sketchsci/selector.hpp"

#include "sketchsci/error.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>

namespace sketchsci::select {

namespace {

    using Bindings = std::map<std::size_t, Term>;

    bool is_var(const Term& t) { return std::holds_alternative<Var>(t); }

    /// Extends `bindings` so that `pattern` equals `target`; on failure the
    /// bindings are left untouched.
    bool unify(const Atom& pattern, const Atom& target, Bindings& bindings)
    {
        if (pattern.pred != target.pred || pattern.args.size() != target.args.size())
            return false;
        std::vector<std::size_t> added;
        for (std::size_t i = 0; i < pattern.args.size(); ++i) {
            const auto& p = pattern.args[i];
            const auto& t = target.args[i];
            if (const auto* v = std::get_if<Var>(&p)) {
                auto it = bindings.find(v->id);
                if (it == bindings.end()) {
                    bindings.emplace(v->id, t);
                    added.push_back(v->id);
                    continue;
                }
                if (it->second == t)
                    continue;
            } else if (p == t) {
                continue;
            }
            for (auto id : added)
                bindings.erase(id);
            return false;
        }
        return true;
    }

    using FactIndex = std::map<std::size_t, std::vector<const Atom*>>;

    FactIndex index_facts(const std::vector<Atom>& facts)
    {
        FactIndex index;
        for (const auto& fact : facts)
            index[fact.pred].push_back(&fact);
        return index;
    }

    /// Depth-first search matching the atoms listed in `order` against the
    /// index. The next atom is always the one with the fewest compatible facts
    /// under the current bindings. `visit` returns true to stop the search;
    /// `budget` bounds the number of nodes (exhausting it counts as failure).
    bool solve(const std::vector<Atom>& atoms, std::vector<std::size_t> order, const FactIndex& index,
        Bindings& bindings, std::vector<const Atom*>& chosen,
        const std::function<bool(const std::vector<const Atom*>&)>& visit, std::size_t& budget)
    {
        if (order.empty())
            return visit(chosen);
        if (budget == 0)
            return false;
        --budget;

        std::size_t best_slot = 0;
        std::vector<const Atom*> best_candidates;
        bool first = true;
        for (std::size_t slot = 0; slot < order.size(); ++slot) {
            const auto& atom = atoms[order[slot]];
            std::vector<const Atom*> candidates;
            if (auto it = index.find(atom.pred); it != index.end()) {
                for (const auto* fact : it->second) {
                    Bindings probe = bindings;
                    if (unify(atom, *fact, probe))
                        candidates.push_back(fact);
                }
            }
            if (first || candidates.size() < best_candidates.size()) {
                first = false;
                best_slot = slot;
                best_candidates = std::move(candidates);
                if (best_candidates.empty())
                    return false;
            }
        }

        std::size_t atom_index = order[best_slot];
        order.erase(order.begin() + static_cast<std::ptrdiff_t>(best_slot));
        for (const auto* fact : best_candidates) {
            Bindings saved = bindings;
            unify(atoms[atom_index], *fact, bindings);
            chosen[atom_index] = fact;
            if (solve(atoms, order, index, bindings, chosen, visit, budget))
                return true;
            bindings = std::move(saved);
        }
        return false;
    }

    constexpr std::size_t search_budget = 200000;

    std::vector<std::size_t> all_but(std::size_t n, std::size_t skip)
    {
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < n; ++i)
            if (i != skip)
                order.push_back(i);
        return order;
    }

    std::string quote(const std::string& text)
    {
        std::string out = "'";
        for (char c : text) {
            if (c == '\'')
                out += '\'';
            out += c;
        }
        return out + "'";
    }

    std::string render_constant(const CellValue& value)
    {
        if (value.is_number())
            return value.display();
        if (value.is_bool())
            return value.flag() ? "true" : "false";
        if (value.is_missing())
            return "'?'";
        if (value.is_empty())
            return "''";
        return quote(value.text());
    }

    std::string variable_base(const std::string& column)
    {
        std::string out;
        for (char c : column)
            out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
        if (out.empty() || !std::isalpha(static_cast<unsigned char>(out[0])))
            out = "V" + out;
        out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
        return out;
    }

    /// Renumbers variables 0, 1, ... in order of first occurrence.
    Query renumber(const Query& q)
    {
        std::map<std::size_t, std::size_t> ids;
        Query out = q;
        for (auto& atom : out.atoms)
            for (auto& arg : atom.args)
                if (auto* v = std::get_if<Var>(&arg))
                    v->id = ids.try_emplace(v->id, ids.size()).first->second;
        return out;
    }

    std::string describe_row(const Template& tmpl, const Atom& fact)
    {
        const auto& id = std::get<RowId>(fact.args[0]);
        return tmpl.predicates[id.pred].table + " row " + std::to_string(id.row + 1);
    }

    bool same_values(const Atom& a, const Atom& b)
    {
        return a.pred == b.pred && std::equal(a.args.begin() + 1, a.args.end(), b.args.begin() + 1, b.args.end());
    }

} // namespace

Template build_template(const Workbook& workbook, const Sketch& sketch)
{
    require_roles(sketch, {Role::positive, Role::negative}, "select");
    auto positives = sketch.cells_with_role(Role::positive);
    if (positives.empty())
        throw Error(ErrorCode::task_role, "select requires at least one positive-colored cell",
            "expected roles: positive, negative");
    auto negatives = sketch.cells_with_role(Role::negative);

    std::map<std::string, std::set<std::size_t>> colored;
    for (const auto* cells : {&positives, &negatives})
        for (const auto& cell : *cells)
            colored[cell.table].insert(cell.col);

    Template tmpl;
    std::map<std::string, std::size_t> pred_of;
    for (const auto& table : workbook.tables()) {
        if (!colored.count(table.name()))
            continue;
        pred_of[table.name()] = tmpl.predicates.size();
        tmpl.predicates.push_back(Predicate{table.name(), {}, {}});
    }

    // Foreign keys among colored tables keep their columns, colored or not.
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>>> links;
    for (const auto& fk : workbook.schema()) {
        if (!pred_of.count(fk.from_table) || !pred_of.count(fk.to_table))
            continue;
        const auto& from = workbook.table(fk.from_table);
        const auto& to = workbook.table(fk.to_table);
        for (std::size_t i = 0; i < fk.from_cols.size(); ++i) {
            auto a = *from.column_index(fk.from_cols[i]);
            auto b = *to.column_index(fk.to_cols[i]);
            colored[fk.from_table].insert(a);
            colored[fk.to_table].insert(b);
            links.push_back({{pred_of[fk.from_table], a}, {pred_of[fk.to_table], b}});
        }
    }

    for (auto& pred : tmpl.predicates) {
        const auto& table = workbook.table(pred.table);
        for (auto col : colored[pred.table]) {
            pred.columns.push_back(col);
            pred.names.push_back(table.header()[col]);
        }
    }

    // Union-find over tables for connectivity, and over columns for join variables.
    std::vector<std::size_t> component(tmpl.predicates.size());
    std::iota(component.begin(), component.end(), 0);
    std::function<std::size_t(std::size_t)> root = [&](std::size_t x) {
        return component[x] == x ? x : component[x] = root(component[x]);
    };
    std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>> parent;
    std::function<std::pair<std::size_t, std::size_t>(std::pair<std::size_t, std::size_t>)> column_root =
        [&](std::pair<std::size_t, std::size_t> x) {
            auto it = parent.find(x);
            if (it == parent.end() || it->second == x)
                return x;
            return it->second = column_root(it->second);
        };
    for (const auto& [a, b] : links) {
        component[root(a.first)] = root(b.first);
        auto ra = column_root(a), rb = column_root(b);
        if (ra != rb)
            parent[std::max(ra, rb)] = std::min(ra, rb);
    }

    std::map<std::size_t, std::vector<std::string>> groups;
    for (std::size_t p = 0; p < tmpl.predicates.size(); ++p)
        groups[root(p)].push_back(tmpl.predicates[p].table);
    if (groups.size() > 1) {
        std::string details;
        for (const auto& [r, tables] : groups) {
            details += details.empty() ? "{" : " {";
            for (std::size_t i = 0; i < tables.size(); ++i)
                details += (i ? ", " : "") + tables[i];
            details += "}";
        }
        throw Error(ErrorCode::schema, "colored tables are not connected by foreign keys", "components: " + details);
    }

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> var_of;
    std::size_t next = 0;
    for (std::size_t p = 0; p < tmpl.predicates.size(); ++p) {
        Atom atom{p, {Var{next++}}};
        for (auto col : tmpl.predicates[p].columns) {
            auto key = column_root({p, col});
            auto it = var_of.find(key);
            if (it == var_of.end())
                it = var_of.emplace(key, next++).first;
            atom.args.push_back(Var{it->second});
        }
        tmpl.query.atoms.push_back(std::move(atom));
    }
    return tmpl;
}

std::vector<Atom> database_facts(const Workbook& workbook, const Template& tmpl)
{
    std::vector<Atom> facts;
    for (std::size_t p = 0; p < tmpl.predicates.size(); ++p) {
        const auto& pred = tmpl.predicates[p];
        const auto& table = workbook.table(pred.table);
        for (std::size_t r = 0; r < table.row_count(); ++r) {
            Atom atom{p, {RowId{p, r}}};
            for (auto col : pred.columns)
                atom.args.push_back(table.at(r, col));
            facts.push_back(std::move(atom));
        }
    }
    return facts;
}

Examples extend_examples(const Workbook& workbook, const Sketch& sketch, const Template& tmpl)
{
    auto facts = database_facts(workbook, tmpl);
    auto index = index_facts(facts);
    const auto fact_at = [&](std::size_t pred, std::size_t row) -> const Atom& {
        return *index.at(pred).at(row);
    };

    // Columns that take part in a join: their variable appears in another atom.
    std::map<std::size_t, std::size_t> occurrences;
    for (const auto& atom : tmpl.query.atoms)
        for (std::size_t i = 1; i < atom.args.size(); ++i)
            ++occurrences[std::get<Var>(atom.args[i]).id];

    const auto rows_with = [&](Role role) {
        std::set<std::pair<std::size_t, std::size_t>> rows;
        for (const auto& cell : sketch.cells_with_role(role))
            for (std::size_t p = 0; p < tmpl.predicates.size(); ++p)
                if (tmpl.predicates[p].table == cell.table)
                    rows.insert({p, cell.row});
        return rows;
    };

    Examples out;
    for (const auto& [pred, row] : rows_with(Role::positive)) {
        const auto& seed = fact_at(pred, row);
        const auto& pattern = tmpl.query.atoms[pred];
        bool missing_join = false;
        for (std::size_t i = 1; i < pattern.args.size(); ++i)
            if (occurrences[std::get<Var>(pattern.args[i]).id] > 1 && std::get<CellValue>(seed.args[i]).is_missing())
                missing_join = true;
        if (missing_join) {
            out.warnings.push_back("skipped positive " + describe_row(tmpl, seed) + ": Missing value in a join column");
            continue;
        }

        Bindings bindings;
        unify(pattern, seed, bindings);
        std::set<Atom> partners;
        std::vector<const Atom*> chosen(tmpl.query.atoms.size(), nullptr);
        std::size_t budget = search_budget;
        solve(tmpl.query.atoms, all_but(tmpl.query.atoms.size(), pred), index, bindings, chosen,
            [&](const std::vector<const Atom*>& matched) {
                for (std::size_t i = 0; i < matched.size(); ++i)
                    if (i != pred)
                        partners.insert(*matched[i]);
                return false;
            },
            budget);
        RelExample example{seed, {seed}};
        for (const auto& partner : partners)
            if (partner != seed)
                example.facts.push_back(partner);
        out.positives.push_back(std::move(example));
    }
    for (const auto& [pred, row] : rows_with(Role::negative)) {
        const auto& seed = fact_at(pred, row);
        out.negatives.push_back(RelExample{seed, {seed}});
    }
    return out;
}

Query as_query(const std::vector<Atom>& facts)
{
    Query q;
    std::map<RowId, std::size_t> ids;
    for (const auto& fact : facts) {
        Atom atom = fact;
        if (const auto* id = std::get_if<RowId>(&atom.args[0]))
            atom.args[0] = Var{ids.try_emplace(*id, ids.size()).first->second};
        q.atoms.push_back(std::move(atom));
    }
    return q;
}

bool subsumes(const Query& general, const Query& specific)
{
    if (general.atoms.empty())
        return true;
    auto index = index_facts(specific.atoms);
    Bindings bindings;
    std::vector<const Atom*> chosen(general.atoms.size(), nullptr);
    std::vector<std::size_t> order(general.atoms.size());
    std::iota(order.begin(), order.end(), 0);
    std::size_t budget = search_budget;
    return solve(general.atoms, order, index, bindings, chosen, [](const auto&) { return true; }, budget);
}

Query theta_reduce(Query query)
{
    bool changed = true;
    while (changed && query.atoms.size() > 1) {
        changed = false;
        for (std::size_t i = query.atoms.size(); i-- > 0;) {
            Query smaller = query;
            smaller.atoms.erase(smaller.atoms.begin() + static_cast<std::ptrdiff_t>(i));
            if (subsumes(query, smaller)) {
                query = std::move(smaller);
                changed = true;
                break;
            }
        }
    }
    return query;
}

Query lgg(const Query& a, const Query& b, std::size_t max_atoms)
{
    std::map<std::pair<Term, Term>, std::size_t> pair_var;
    const auto var_for = [&](const Term& x, const Term& y) {
        return Var{pair_var.try_emplace({x, y}, pair_var.size()).first->second};
    };

    std::set<Atom> atoms;
    for (const auto& x : a.atoms) {
        for (const auto& y : b.atoms) {
            if (x.pred != y.pred || x.args.size() != y.args.size())
                continue;
            Atom z{x.pred, {}};
            for (std::size_t i = 0; i < x.args.size(); ++i) {
                // row identifiers always generalize; equal constants stay
                bool keep = i > 0 && !is_var(x.args[i]) && x.args[i] == y.args[i];
                z.args.push_back(keep ? x.args[i] : Term{var_for(x.args[i], y.args[i])});
            }
            atoms.insert(std::move(z));
        }
    }
    Query out = theta_reduce(Query{{atoms.begin(), atoms.end()}});

    if (out.atoms.size() > max_atoms) {
        std::map<std::size_t, std::size_t> uses;
        for (const auto& atom : out.atoms)
            for (std::size_t i = 1; i < atom.args.size(); ++i)
                if (const auto* v = std::get_if<Var>(&atom.args[i]))
                    ++uses[v->id];
        for (std::size_t i = out.atoms.size(); i-- > 0 && out.atoms.size() > max_atoms;) {
            const auto& args = out.atoms[i].args;
            bool isolated = std::all_of(args.begin() + 1, args.end(), [&](const Term& t) {
                const auto* v = std::get_if<Var>(&t);
                return v && uses[v->id] == 1;
            });
            if (isolated)
                out.atoms.erase(out.atoms.begin() + static_cast<std::ptrdiff_t>(i));
        }
        if (out.atoms.size() > max_atoms)
            out.atoms.resize(max_atoms);
    }
    return out;
}

bool covers(const Query& q, const std::vector<Atom>& facts, const Atom& seed)
{
    auto index = index_facts(facts);
    for (std::size_t i = 0; i < q.atoms.size(); ++i) {
        Bindings bindings;
        if (!unify(q.atoms[i], seed, bindings))
            continue;
        std::vector<const Atom*> chosen(q.atoms.size(), nullptr);
        std::size_t budget = search_budget;
        if (solve(q.atoms, all_but(q.atoms.size(), i), index, bindings, chosen, [](const auto&) { return true; },
                budget))
            return true;
    }
    return false;
}

std::vector<std::vector<Atom>> answers(const Query& q, const std::vector<Atom>& facts)
{
    std::vector<std::vector<Atom>> out;
    auto index = index_facts(facts);
    Bindings bindings;
    std::vector<const Atom*> chosen(q.atoms.size(), nullptr);
    std::vector<std::size_t> order(q.atoms.size());
    std::iota(order.begin(), order.end(), 0);
    std::size_t budget = std::numeric_limits<std::size_t>::max();
    solve(q.atoms, order, index, bindings, chosen,
        [&](const std::vector<const Atom*>& matched) {
            std::vector<Atom> answer;
            for (const auto* fact : matched)
                answer.push_back(*fact);
            out.push_back(std::move(answer));
            return false;
        },
        budget);
    return out;
}

std::string to_prolog(const Query& q, const Template& tmpl)
{
    std::map<std::size_t, std::string> names;
    std::set<std::string> used;
    std::size_t rows = 0;
    const auto name_of = [&](std::size_t id, const std::string& base) -> const std::string& {
        auto it = names.find(id);
        if (it != names.end())
            return it->second;
        std::string name = base;
        for (int suffix = 2; used.count(name); ++suffix)
            name = base + std::to_string(suffix);
        used.insert(name);
        return names.emplace(id, name).first->second;
    };

    std::string out = "?- ";
    for (std::size_t a = 0; a < q.atoms.size(); ++a) {
        const auto& atom = q.atoms[a];
        const auto& pred = tmpl.predicates.at(atom.pred);
        out += (a ? ", " : "") + pred.table + "(";
        for (std::size_t i = 0; i < atom.args.size(); ++i) {
            if (i)
                out += ",";
            const auto& arg = atom.args[i];
            if (const auto* v = std::get_if<Var>(&arg)) {
                if (i == 0 && !names.count(v->id))
                    out += name_of(v->id, "I" + std::to_string(rows++));
                else
                    out += name_of(v->id, variable_base(i == 0 ? "I" : pred.names.at(i - 1)));
            } else if (const auto* id = std::get_if<RowId>(&arg)) {
                out += "r" + std::to_string(id->row + 1);
            } else {
                out += render_constant(std::get<CellValue>(arg));
            }
        }
        out += ")";
    }
    return out + ".";
}

Query canonicalize(const Query& q, const Template&)
{
    // The canonical form is the atom order and variable numbering with the
    // lexicographically least encoding. Atoms are chosen greedily by their
    // encoding under the variables numbered so far; only ties branch.
    using Token = std::pair<int, Term>;
    using Encoding = std::vector<Token>;

    std::vector<Atom> atoms = q.atoms;
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());

    const auto encode = [](const Atom& atom, const std::map<std::size_t, std::size_t>& numbering) {
        Encoding out{{-1, Term{CellValue{static_cast<double>(atom.pred)}}}};
        std::map<std::size_t, std::size_t> local = numbering;
        for (const auto& arg : atom.args) {
            if (const auto* v = std::get_if<Var>(&arg)) {
                auto [it, fresh] = local.try_emplace(v->id, local.size());
                out.push_back({fresh ? 2 : 1, Term{Var{fresh ? 0 : it->second}}});
            } else {
                out.push_back({0, arg});
            }
        }
        return out;
    };

    std::optional<Encoding> best;
    std::vector<std::size_t> best_order;
    Encoding sequence;
    std::vector<std::size_t> order;
    std::vector<bool> used(atoms.size(), false);

    std::function<void(const std::map<std::size_t, std::size_t>&)> visit =
        [&](const std::map<std::size_t, std::size_t>& numbering) {
            if (order.size() == atoms.size()) {
                if (!best || sequence < *best) {
                    best = sequence;
                    best_order = order;
                }
                return;
            }
            std::optional<Encoding> least;
            std::vector<std::size_t> ties;
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                if (used[i])
                    continue;
                auto e = encode(atoms[i], numbering);
                if (!least || e < *least) {
                    least = std::move(e);
                    ties = {i};
                } else if (e == *least) {
                    ties.push_back(i);
                }
            }
            std::size_t mark = sequence.size();
            sequence.insert(sequence.end(), least->begin(), least->end());
            bool worse = best && std::lexicographical_compare(best->begin(),
                                     best->begin() + static_cast<std::ptrdiff_t>(sequence.size()), sequence.begin(),
                                     sequence.end());
            if (!worse) {
                for (auto i : ties) {
                    auto next = numbering;
                    for (const auto& arg : atoms[i].args)
                        if (const auto* v = std::get_if<Var>(&arg))
                            next.try_emplace(v->id, next.size());
                    used[i] = true;
                    order.push_back(i);
                    visit(next);
                    order.pop_back();
                    used[i] = false;
                }
            }
            sequence.resize(mark);
        };
    visit({});

    Query out;
    for (auto i : best_order)
        out.atoms.push_back(atoms[i]);
    return renumber(out);
}

std::vector<Query> induce_queries(const std::vector<RelExample>& positives, const std::vector<RelExample>& negatives,
    const std::vector<Atom>& database, const Template& tmpl, const SelectionConfig& cfg)
{
    for (const auto& pos : positives)
        for (const auto& neg : negatives)
            if (same_values(pos.seed, neg.seed))
                throw Error(ErrorCode::inconsistency, "a positive example equals a negative tuple",
                    describe_row(tmpl, pos.seed) + " vs " + describe_row(tmpl, neg.seed));

    const auto consistent = [&](const Query& q) {
        return std::none_of(
            negatives.begin(), negatives.end(), [&](const RelExample& neg) { return covers(q, database, neg.seed); });
    };
    const auto covered_by = [&](const Query& q) {
        std::set<std::size_t> out;
        for (std::size_t i = 0; i < positives.size(); ++i)
            if (covers(q, positives[i].facts, positives[i].seed))
                out.insert(i);
        return out;
    };

    struct Clause {
        Query query;
        std::set<std::size_t> covered;
    };
    std::vector<Clause> theory;
    std::set<std::size_t> uncovered;
    for (std::size_t i = 0; i < positives.size(); ++i)
        uncovered.insert(i);
    std::mt19937 rng(cfg.seed);

    while (!uncovered.empty()) {
        // Items to generalize: adopted clauses first, then uncovered examples.
        std::vector<Query> items;
        for (const auto& clause : theory)
            items.push_back(clause.query);
        for (auto i : uncovered)
            items.push_back(as_query(positives[i].facts));

        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t i = 0; i < items.size(); ++i)
            for (std::size_t j = i + 1; j < items.size(); ++j)
                pairs.emplace_back(i, j);
        if (pairs.size() > cfg.pair_samples) {
            std::shuffle(pairs.begin(), pairs.end(), rng);
            pairs.resize(cfg.pair_samples);
        }

        struct Best {
            Clause clause;
            std::size_t gain;
            std::string text;
        };
        std::optional<Best> best;
        for (const auto& [i, j] : pairs) {
            Query candidate = canonicalize(lgg(items[i], items[j], cfg.max_atoms), tmpl);
            if (!consistent(candidate))
                continue;
            auto covered = covered_by(candidate);
            std::size_t gain = 0;
            for (auto c : covered)
                gain += uncovered.count(c);
            if (gain == 0)
                continue;
            auto text = to_prolog(candidate, tmpl);
            if (!best || gain > best->gain || (gain == best->gain && text < best->text))
                best = Best{{candidate, covered}, gain, text};
        }
        if (!best)
            break;

        std::vector<Clause> kept;
        // A clause is replaced only when the new one covers all it did: the lgg
        // of a clause can lose the seed predicate's atom and with it coverage.
        for (auto& clause : theory) {
            bool subsumed = std::includes(best->clause.covered.begin(), best->clause.covered.end(),
                clause.covered.begin(), clause.covered.end());
            if (!subsumed)
                kept.push_back(std::move(clause));
        }
        for (auto c : best->clause.covered)
            uncovered.erase(c);
        kept.push_back(std::move(best->clause));
        theory = std::move(kept);
    }

    std::vector<Query> out;
    for (const auto& clause : theory)
        out.push_back(clause.query);
    for (auto i : uncovered) {
        std::vector<Atom> facts;
        for (const auto& fact : positives[i].facts) {
            bool negative = std::any_of(
                negatives.begin(), negatives.end(), [&](const RelExample& neg) { return same_values(fact, neg.seed); });
            if (!negative)
                facts.push_back(fact);
        }
        auto ground = canonicalize(as_query(facts), tmpl);
        if (std::find(out.begin(), out.end(), ground) == out.end())
            out.push_back(std::move(ground));
    }
    return out;
}

Sketch apply_selection(
    const std::vector<Query>& queries, const Workbook& workbook, const Template& tmpl, const Sketch& original)
{
    auto facts = database_facts(workbook, tmpl);
    std::set<std::pair<std::size_t, std::size_t>> rows;
    for (const auto& q : queries)
        for (const auto& answer : answers(q, facts))
            for (const auto& fact : answer) {
                const auto& id = std::get<RowId>(fact.args[0]);
                rows.insert({id.pred, id.row});
            }

    std::string color = "positive";
    for (const auto& coloring : original.colorings)
        if (coloring.role == Role::positive) {
            color = coloring.color;
            break;
        }
    auto user_positive = original.cells_with_role(Role::positive);

    Coloring selected{color, Role::positive, {}};
    for (const auto& [pred, row] : rows) {
        const auto& p = tmpl.predicates[pred];
        for (auto col : p.columns) {
            CellRef cell{p.table, row, col};
            const auto* owner = original.coloring_of(cell);
            if (owner && owner->role != Role::positive)
                continue;
            selected.cells.insert(cell);
        }
    }

    Sketch out;
    bool placed = false;
    for (const auto& coloring : original.colorings) {
        if (coloring.role != Role::positive) {
            out.colorings.push_back(coloring);
        } else if (!placed) {
            placed = true;
            if (!selected.cells.empty())
                out.colorings.push_back(selected);
        }
    }
    if (!placed && !selected.cells.empty())
        out.colorings.insert(out.colorings.begin(), selected);
    for (const auto& cell : selected.cells)
        if (!user_positive.count(cell))
            out.machine_generated.insert(cell);
    return out;
}

SelectionResult run_selection(const Workbook& workbook, const Sketch& sketch, const SelectionConfig& cfg)
{
    SelectionResult result;
    result.tmpl = build_template(workbook, sketch);
    auto examples = extend_examples(workbook, sketch, result.tmpl);
    result.warnings = examples.warnings;
    if (examples.positives.empty())
        throw Error(ErrorCode::validation, "no usable positive example",
            examples.warnings.empty() ? "" : examples.warnings.front());
    auto database = database_facts(workbook, result.tmpl);
    result.queries = induce_queries(examples.positives, examples.negatives, database, result.tmpl, cfg);
    result.sketch = apply_selection(result.queries, workbook, result.tmpl, sketch);
    return result;
}

} // namespace sketchsci::select
