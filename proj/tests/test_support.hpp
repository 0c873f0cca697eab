#pragma once

#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "istar/model.hpp"
#include "istar/parser.hpp"
#include "istar/validator.hpp"

namespace istar::test {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline std::string corpus_path() {
    return std::string(ISTAR_CORPUS_DIR) + "/travel.istar";
}

inline Model load_corpus() {
    ParseOutcome outcome = parse(read_file(corpus_path()), "travel.istar");
    if (!outcome.ok()) throw std::runtime_error("corpus failed to parse");
    return *outcome.model;
}

// ---------------------------------------------------------------------------
// Structural equality, ignoring id values and spans. Entities are keyed by
// position: actors by declaration index, boundary elements by (actor index,
// index within boundary), dependums by owning dependency index. Link lists
// are compared as sorted multisets so that per-boundary regrouping (the
// formatter's layout) does not matter.
// ---------------------------------------------------------------------------

inline std::string structural_signature(const Model& m) {
    std::map<std::uint32_t, std::string> key;
    std::map<std::uint32_t, std::size_t> actorIndex;
    for (std::size_t i = 0; i < m.actors.size(); ++i) {
        actorIndex[m.actors[i].id.value] = i;
        key[m.actors[i].id.value] = "A" + std::to_string(i);
    }
    for (std::size_t i = 0; i < m.actors.size(); ++i) {
        std::size_t within = 0;
        for (const IntentionalElement& elem : m.elements) {
            const ActorId* owner = std::get_if<ActorId>(&elem.owner);
            if (owner && *owner == m.actors[i].id)
                key[elem.id.value] =
                    "B" + std::to_string(i) + "." + std::to_string(within++);
        }
    }
    for (std::size_t i = 0; i < m.dependencies.size(); ++i)
        key[m.dependencies[i].dependum.value] = "D" + std::to_string(i);

    auto k = [&](std::uint32_t id) {
        auto it = key.find(id);
        return it != key.end() ? it->second : "?" + std::to_string(id);
    };

    std::ostringstream sig;
    sig << "actors[";
    for (const Actor& actor : m.actors)
        sig << to_string(actor.kind) << ":" << actor.name << ";";
    sig << "]elements[";
    for (const Actor& actor : m.actors)
        for (const IntentionalElement& elem : m.elements) {
            const ActorId* owner = std::get_if<ActorId>(&elem.owner);
            if (owner && *owner == actor.id)
                sig << k(elem.id.value) << "=" << to_string(elem.kind) << ":"
                    << elem.name << ";";
        }
    sig << "]";

    std::vector<std::string> actorLinks;
    for (const ActorLink& link : m.actorLinks)
        actorLinks.push_back(std::string(to_string(link.kind)) + "|" +
                             k(link.source.value) + "|" + k(link.target.value));
    std::sort(actorLinks.begin(), actorLinks.end());
    sig << "actorLinks[";
    for (const auto& s : actorLinks) sig << s << ";";
    sig << "]";

    std::vector<std::string> refinements;
    for (const Refinement& r : m.refinements) {
        std::string s = (r.op == RefinementOperator::And ? "and" : "or");
        s += "|" + k(r.parent.value) + "<-";
        for (ElementId child : r.children) s += k(child.value) + ",";
        refinements.push_back(std::move(s));
    }
    std::sort(refinements.begin(), refinements.end());
    sig << "refinements[";
    for (const auto& s : refinements) sig << s << ";";
    sig << "]";

    std::vector<std::string> links;
    for (const ElementLink& link : m.elementLinks) {
        if (const Contribution* c = std::get_if<Contribution>(&link.variant))
            links.push_back(std::string("contrib|") + to_string(c->level) +
                            "|" + k(c->source.value) + "|" +
                            k(c->target.value));
        else if (const NeededBy* n = std::get_if<NeededBy>(&link.variant))
            links.push_back("needs|" + k(n->resource.value) + "|" +
                            k(n->task.value));
        else {
            const Qualification& q = std::get<Qualification>(link.variant);
            links.push_back("qual|" + k(q.quality.value) + "|" +
                            k(q.subject.value));
        }
    }
    std::sort(links.begin(), links.end());
    sig << "elementLinks[";
    for (const auto& s : links) sig << s << ";";
    sig << "]dependencies[";
    for (const Dependency& dep : m.dependencies) {
        const IntentionalElement* dependum = m.find(dep.dependum);
        sig << k(dep.depender.value) << "|"
            << (dep.dependerElmt ? k(dep.dependerElmt->value) : "-") << "|"
            << (dependum ? to_string(dependum->kind) : "?") << ":"
            << (dependum ? dependum->name : "?") << "|" << k(dep.dependee.value)
            << "|" << (dep.dependeeElmt ? k(dep.dependeeElmt->value) : "-")
            << ";";
    }
    sig << "]";
    return sig.str();
}

inline bool structurally_equal(const Model& a, const Model& b) {
    return structural_signature(a) == structural_signature(b);
}

// ---------------------------------------------------------------------------
// Random valid models. Validity is guaranteed by construction: actor links
// and refinement edges only point from higher declaration indices to lower
// ones (so the graphs are acyclic) and dependency endpoint elements avoid
// anything refined or contributed to.
// ---------------------------------------------------------------------------

inline Model random_model(std::mt19937& rng) {
    Model m;
    auto pick = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };

    int actorCount = pick(1, 5);
    std::vector<ActorId> actors;
    std::vector<std::vector<ElementId>> boundary(actorCount);
    for (int i = 0; i < actorCount; ++i) {
        ActorKind kind = static_cast<ActorKind>(pick(0, 2));
        actors.push_back(*add_actor(m, "Actor " + std::to_string(i), kind));
        int elementCount = pick(0, 6);
        for (int j = 0; j < elementCount; ++j) {
            ElementKind ekind = static_cast<ElementKind>(pick(0, 3));
            boundary[i].push_back(*add_element(
                m, actors[i],
                "E" + std::to_string(i) + "." + std::to_string(j), ekind));
        }
    }

    // actor links: always high index -> low index, so acyclic
    int linkAttempts = pick(0, actorCount * 2);
    for (int t = 0; t < linkAttempts; ++t) {
        if (actorCount < 2) break;
        int hi = pick(1, actorCount - 1);
        int lo = pick(0, hi - 1);
        ActorLinkKind kind = pick(0, 1) == 0 ? ActorLinkKind::IsA
                                             : ActorLinkKind::ParticipatesIn;
        (void)add_actor_link(m, actors[hi], actors[lo], kind);  // may refuse
    }

    // refinements: parent earlier than all children, so acyclic
    for (int i = 0; i < actorCount; ++i) {
        const auto& elems = boundary[i];
        for (std::size_t p = 0; p + 1 < elems.size(); ++p) {
            if (pick(0, 2) != 0) continue;
            std::vector<ElementId> children;
            for (std::size_t c = p + 1; c < elems.size(); ++c)
                if (pick(0, 1) == 0) children.push_back(elems[c]);
            if (children.empty()) continue;
            RefinementOperator op = children.size() >= 2 && pick(0, 1) == 0
                                        ? RefinementOperator::And
                                        : RefinementOperator::Or;
            (void)add_refinement(m, elems[p], children, op);
        }
    }

    // element links within each boundary
    for (int i = 0; i < actorCount; ++i) {
        const auto& elems = boundary[i];
        if (elems.size() < 2) continue;
        int attempts = pick(0, 4);
        for (int t = 0; t < attempts; ++t) {
            ElementId a = elems[pick(0, (int)elems.size() - 1)];
            ElementId b = elems[pick(0, (int)elems.size() - 1)];
            switch (pick(0, 2)) {
                case 0:
                    (void)add_element_link(
                        m, Contribution{a, b,
                                        static_cast<ContributionLevel>(
                                            pick(0, 3))});
                    break;
                case 1: (void)add_element_link(m, NeededBy{a, b}); break;
                case 2: (void)add_element_link(m, Qualification{a, b}); break;
            }
        }
    }

    // dependencies; dependerElmt must not be refined or contributed to
    auto elaborated = [&](ElementId id) {
        for (const Refinement& r : m.refinements)
            if (r.parent == id) return true;
        for (const ElementLink& link : m.elementLinks) {
            const Contribution* c = std::get_if<Contribution>(&link.variant);
            if (c && c->target == id) return true;
        }
        return false;
    };
    int depCount = actorCount >= 2 ? pick(0, 4) : 0;
    for (int t = 0; t < depCount; ++t) {
        int from = pick(0, actorCount - 1);
        int to = pick(0, actorCount - 1);
        if (from == to) continue;
        std::optional<ElementId> dependerElmt, dependeeElmt;
        if (!boundary[from].empty() && pick(0, 1) == 0) {
            ElementId candidate =
                boundary[from][pick(0, (int)boundary[from].size() - 1)];
            if (!elaborated(candidate)) dependerElmt = candidate;
        }
        if (!boundary[to].empty() && pick(0, 1) == 0)
            dependeeElmt = boundary[to][pick(0, (int)boundary[to].size() - 1)];
        (void)add_dependency(m, actors[from], dependerElmt,
                             "Dependum " + std::to_string(t),
                             static_cast<ElementKind>(pick(0, 3)), actors[to],
                             dependeeElmt);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Brute-force elementary-cycle oracle: plain DFS over simple paths whose
// smallest vertex is the start. Independent of the blocked-set search in
// the library.
// ---------------------------------------------------------------------------

using Digraph = std::vector<std::vector<int>>;  // adjacency by index

inline void oracle_dfs(const Digraph& g, int start, int v,
                       std::vector<int>& path, std::vector<bool>& onPath,
                       std::vector<std::vector<int>>& out) {
    for (int w : g[v]) {
        if (w < start) continue;
        if (w == start) {
            out.push_back(path);
        } else if (!onPath[w]) {
            path.push_back(w);
            onPath[w] = true;
            oracle_dfs(g, start, w, path, onPath, out);
            onPath[w] = false;
            path.pop_back();
        }
    }
}

inline std::vector<std::vector<int>> oracle_cycles(const Digraph& g) {
    std::vector<std::vector<int>> out;
    int n = (int)g.size();
    for (int s = 0; s < n; ++s) {
        std::vector<int> path{s};
        std::vector<bool> onPath(n, false);
        onPath[s] = true;
        oracle_dfs(g, s, s, path, onPath, out);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Wraps an arbitrary digraph as a model of actors + participates-in links,
// bypassing the constructors (which refuse self links and parallel pairs).
inline Model digraph_model(const Digraph& g, std::vector<ActorId>* idsOut) {
    Model m;
    std::vector<ActorId> ids;
    for (std::size_t i = 0; i < g.size(); ++i)
        ids.push_back(*add_actor(m, "N" + std::to_string(i), ActorKind::Role));
    for (std::size_t v = 0; v < g.size(); ++v)
        for (int w : g[v])
            m.actorLinks.push_back({ActorLinkId{m.freshId()}, ids[v],
                                    ids[(std::size_t)w],
                                    ActorLinkKind::ParticipatesIn});
    if (idsOut) *idsOut = ids;
    return m;
}

// ---------------------------------------------------------------------------
// Minimal violating models, one per diagnostic code. Codes the constructors
// refuse are assembled through raw insertion.
// ---------------------------------------------------------------------------

inline Model minimal_violation(const std::string& code) {
    Model m;
    auto role = [&](const char* name) {
        return *add_actor(m, name, ActorKind::Role);
    };
    auto raw_element = [&](ActorId owner, const char* name, ElementKind kind) {
        ElementId id{m.freshId()};
        m.elements.push_back({id, name, kind, owner});
        return id;
    };
    auto raw_actor_link = [&](ActorId a, ActorId b, ActorLinkKind kind) {
        m.actorLinks.push_back({ActorLinkId{m.freshId()}, a, b, kind});
    };
    auto raw_dependum = [&](DependencyId dep, const char* name,
                            ElementKind kind) {
        ElementId id{m.freshId()};
        m.elements.push_back({id, name, kind, DependumMarker{dep}});
        return id;
    };

    if (code == "E001") {
        ActorId agent = *add_actor(m, "Mike", ActorKind::Agent);
        ActorId r = role("Student");
        raw_actor_link(agent, r, ActorLinkKind::IsA);
    } else if (code == "E002" || code == "E003") {
        ActorLinkKind kind = code == "E002" ? ActorLinkKind::IsA
                                            : ActorLinkKind::ParticipatesIn;
        ActorId a = role("A"), b = role("B"), c = role("C");
        raw_actor_link(a, b, kind);
        raw_actor_link(b, c, kind);
        raw_actor_link(c, a, kind);
    } else if (code == "E004") {
        ActorId a = role("A"), b = role("B");
        raw_actor_link(a, b, ActorLinkKind::IsA);
        raw_actor_link(b, a, ActorLinkKind::ParticipatesIn);
    } else if (code == "E005" || code == "E006") {
        ActorId a = role("A"), b = role("B");
        ElementId stray = raw_element(code == "E005" ? b : a, "Stray",
                                      ElementKind::Goal);
        DependencyId dep{m.freshId()};
        ElementId dependum = raw_dependum(dep, "Dep", ElementKind::Goal);
        Dependency record{dep, a, std::nullopt, dependum, b, std::nullopt};
        if (code == "E005") record.dependerElmt = stray;
        else record.dependeeElmt = stray;
        m.dependencies.push_back(record);
    } else if (code == "E007") {
        ActorId a = role("A");
        DependencyId dep{m.freshId()};
        ElementId dependum = raw_dependum(dep, "Dep", ElementKind::Goal);
        m.dependencies.push_back(
            {dep, a, std::nullopt, dependum, a, std::nullopt});
    } else if (code == "E008") {
        ActorId a = role("A"), b = role("B");
        ElementId parent = *add_element(m, a, "Wanted", ElementKind::Goal);
        ElementId child = *add_element(m, a, "Part", ElementKind::Goal);
        (void)add_dependency(m, a, parent, "Dep", ElementKind::Goal, b,
                             std::nullopt);
        (void)add_refinement(m, parent, {child}, RefinementOperator::Or);
    } else if (code == "E009") {
        ActorId a = role("A");
        ElementId g = *add_element(m, a, "G", ElementKind::Goal);
        ElementId g1 = *add_element(m, a, "G1", ElementKind::Goal);
        (void)add_refinement(m, g, {g1}, RefinementOperator::Or);
        (void)add_refinement(m, g1, {g}, RefinementOperator::Or);
    } else if (code == "E010") {
        ActorId a = role("A"), b = role("B");
        ElementId src = raw_element(a, "T", ElementKind::Task);
        ElementId dst = raw_element(b, "Q", ElementKind::Quality);
        m.elementLinks.push_back(
            {ElementLinkId{m.freshId()},
             Contribution{src, dst, ContributionLevel::Help}});
    } else if (code == "E011") {
        ActorId a = role("A");
        ElementId t = raw_element(a, "T", ElementKind::Task);
        ElementId q = raw_element(a, "Q", ElementKind::Quality);
        m.elementLinks.push_back(
            {ElementLinkId{m.freshId()},
             Contribution{t, q, ContributionLevel::Help}});
        m.elementLinks.push_back(
            {ElementLinkId{m.freshId()}, Qualification{q, t}});
    } else if (code == "E012") {
        ActorId a = role("A");
        ElementId q = raw_element(a, "Q", ElementKind::Quality);
        m.elementLinks.push_back(
            {ElementLinkId{m.freshId()},
             Contribution{q, q, ContributionLevel::Hurt}});
    } else if (code == "E013") {
        ActorId a = role("A");
        ElementId t = raw_element(a, "T", ElementKind::Task);
        ElementId r = raw_element(a, "R", ElementKind::Resource);
        m.elementLinks.push_back(
            {ElementLinkId{m.freshId()}, NeededBy{t, r}});  // ends swapped
    } else if (code == "E014") {
        ActorId a = role("A");
        ElementId g = raw_element(a, "G", ElementKind::Goal);
        ElementId g1 = raw_element(a, "G1", ElementKind::Goal);
        m.refinements.push_back(
            {RefinementId{m.freshId()}, g, {g1}, RefinementOperator::And});
    } else if (code == "E015") {
        ActorId a = role("A");
        ElementId g = raw_element(a, "G", ElementKind::Goal);
        ElementId g1 = raw_element(a, "G1", ElementKind::Goal);
        ElementId g2 = raw_element(a, "G2", ElementKind::Goal);
        m.refinements.push_back(
            {RefinementId{m.freshId()}, g, {g1}, RefinementOperator::Or});
        m.refinements.push_back(
            {RefinementId{m.freshId()}, g, {g2}, RefinementOperator::Or});
    } else if (code == "E016") {
        ActorId a = role("A"), b = role("B"), c = role("C");
        DependencyId first{m.freshId()};
        ElementId dependum = raw_dependum(first, "Dep", ElementKind::Goal);
        m.dependencies.push_back(
            {first, a, std::nullopt, dependum, b, std::nullopt});
        m.dependencies.push_back({DependencyId{m.freshId()}, c, std::nullopt,
                                  dependum, b, std::nullopt});
    } else {
        throw std::runtime_error("unknown code " + code);
    }
    return m;
}

inline const std::vector<std::string>& all_codes() {
    static const std::vector<std::string> codes = {
        "E001", "E002", "E003", "E004", "E005", "E006", "E007", "E008",
        "E009", "E010", "E011", "E012", "E013", "E014", "E015", "E016"};
    return codes;
}

}  // namespace istar::test
