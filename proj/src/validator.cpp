#include "istar/validator.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace istar {

const char* to_string(Severity severity) {
    return severity == Severity::Error ? "error" : "warning";
}

void sort_diagnostics(std::vector<Diagnostic>& diags) {
    std::stable_sort(diags.begin(), diags.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                         if (a.code != b.code) return a.code < b.code;
                         return a.primary.id < b.primary.id;
                     });
}

std::string diagnostic_code_for(ModelErrorCode code) {
    switch (code) {
        case ModelErrorCode::IsAKindMismatch: return "E001";
        case ModelErrorCode::DuplicateActorLink: return "E004";
        case ModelErrorCode::ElmtOwnerMismatch: return "E005";
        case ModelErrorCode::SelfDependency: return "E007";
        case ModelErrorCode::CrossActorLink: return "E010";
        case ModelErrorCode::ContributionQualificationClash: return "E011";
        case ModelErrorCode::SelfContribution: return "E012";
        case ModelErrorCode::MatrixViolation: return "E013";
        case ModelErrorCode::KindNotRefinable: return "E013";
        case ModelErrorCode::AndArityTooSmall: return "E014";
        case ModelErrorCode::ParentAlreadyRefined: return "E015";
        case ModelErrorCode::EmptyName: return "P010";
        case ModelErrorCode::SelfLink: return "P011";
        case ModelErrorCode::DuplicateChild: return "P012";
        case ModelErrorCode::SelfChild: return "P013";
        case ModelErrorCode::UnknownActor:
        case ModelErrorCode::UnknownElement: return "P002";
    }
    return "P001";
}

// ---------------------------------------------------------------------------
// Link compatibility matrix
// ---------------------------------------------------------------------------

bool check_link_matrix(ElementKind sourceKind, ElementKind targetKind,
                       LinkClass linkClass) {
    auto goalOrTask = [](ElementKind k) {
        return k == ElementKind::Goal || k == ElementKind::Task;
    };
    switch (linkClass) {
        case LinkClass::Refinement:
            return goalOrTask(sourceKind) && goalOrTask(targetKind);
        case LinkClass::Contribution:
            return targetKind == ElementKind::Quality;
        case LinkClass::Qualification:
            return sourceKind == ElementKind::Quality &&
                   targetKind != ElementKind::Quality;
        case LinkClass::NeededBy:
            return sourceKind == ElementKind::Resource &&
                   targetKind == ElementKind::Task;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Elementary cycle enumeration (Johnson's algorithm)
// ---------------------------------------------------------------------------

namespace {

class CycleFinder {
public:
    // nodes must be sorted ascending; edges are index pairs
    CycleFinder(std::vector<std::uint32_t> nodes,
                std::vector<std::vector<std::size_t>> adjacency)
        : nodes_(std::move(nodes)), adj_(std::move(adjacency)) {}

    std::vector<std::vector<std::uint32_t>> run() {
        std::size_t n = nodes_.size();
        for (start_ = 0; start_ < n; ++start_) {
            blocked_.assign(n, false);
            blockList_.assign(n, {});
            stack_.clear();
            circuit(start_);
        }
        std::sort(cycles_.begin(), cycles_.end());
        return cycles_;
    }

private:
    bool circuit(std::size_t v) {
        bool found = false;
        stack_.push_back(v);
        blocked_[v] = true;
        for (std::size_t w : adj_[v]) {
            if (w < start_) continue;  // only the subgraph induced by >= start
            if (w == start_) {
                std::vector<std::uint32_t> cycle;
                for (std::size_t idx : stack_) cycle.push_back(nodes_[idx]);
                cycles_.push_back(std::move(cycle));
                found = true;
            } else if (!blocked_[w] && circuit(w)) {
                found = true;
            }
        }
        if (found)
            unblock(v);
        else
            for (std::size_t w : adj_[v])
                if (w >= start_) blockList_[w].insert(v);
        stack_.pop_back();
        return found;
    }

    void unblock(std::size_t v) {
        blocked_[v] = false;
        std::set<std::size_t> pending;
        pending.swap(blockList_[v]);
        for (std::size_t w : pending)
            if (blocked_[w]) unblock(w);
    }

    std::vector<std::uint32_t> nodes_;
    std::vector<std::vector<std::size_t>> adj_;
    std::size_t start_ = 0;
    std::vector<bool> blocked_;
    std::vector<std::set<std::size_t>> blockList_;
    std::vector<std::size_t> stack_;
    std::vector<std::vector<std::uint32_t>> cycles_;
};

std::vector<std::vector<std::uint32_t>> find_cycles(
    const std::vector<std::uint32_t>& rawNodes,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    std::vector<std::uint32_t> nodes = rawNodes;
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    std::map<std::uint32_t, std::size_t> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;
    std::vector<std::vector<std::size_t>> adj(nodes.size());
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (auto [from, to] : edges) {
        if (!index.count(from) || !index.count(to)) continue;
        if (!seen.insert({from, to}).second) continue;
        adj[index[from]].push_back(index[to]);
    }
    for (auto& row : adj) std::sort(row.begin(), row.end());
    return CycleFinder(std::move(nodes), std::move(adj)).run();
}

}  // namespace

std::vector<std::vector<std::uint32_t>> detect_cycles(const Model& model,
                                                      CycleRelation relation) {
    std::vector<std::uint32_t> nodes;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    if (relation == CycleRelation::Refinement) {
        for (const IntentionalElement& elem : model.elements)
            nodes.push_back(elem.id.value);
        for (const Refinement& refinement : model.refinements)
            for (ElementId child : refinement.children)
                edges.push_back({child.value, refinement.parent.value});
    } else {
        ActorLinkKind wanted = relation == CycleRelation::IsA
                                   ? ActorLinkKind::IsA
                                   : ActorLinkKind::ParticipatesIn;
        for (const Actor& actor : model.actors) nodes.push_back(actor.id.value);
        for (const ActorLink& link : model.actorLinks)
            if (link.kind == wanted)
                edges.push_back({link.source.value, link.target.value});
    }
    return find_cycles(nodes, edges);
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

namespace {

struct Emitter {
    const Model& model;
    std::vector<Diagnostic> diags;

    DiagnosticLocation loc(std::uint32_t id) const {
        DiagnosticLocation l;
        l.id = id;
        auto it = model.sourceMap.find(id);
        if (it != model.sourceMap.end()) l.span = it->second;
        return l;
    }

    void emit(const char* code, std::uint32_t primary, std::string message,
              std::vector<std::uint32_t> related = {}) {
        Diagnostic d;
        d.code = code;
        d.severity = Severity::Error;
        d.message = std::move(message);
        d.primary = loc(primary);
        for (std::uint32_t id : related) d.related.push_back(loc(id));
        diags.push_back(std::move(d));
    }
};

std::optional<ActorId> boundary_of(const Model& model, ElementId id) {
    const IntentionalElement* elem = model.find(id);
    if (!elem) return std::nullopt;
    if (const ActorId* actor = std::get_if<ActorId>(&elem->owner))
        return *actor;
    return std::nullopt;
}

std::string name_of(const Model& model, ElementId id) {
    const IntentionalElement* elem = model.find(id);
    return elem ? "'" + elem->name + "'" : "<missing element>";
}

std::string name_of(const Model& model, ActorId id) {
    const Actor* actor = model.find(id);
    return actor ? "'" + actor->name + "'" : "<missing actor>";
}

struct LinkView {
    ElementId source, target;
    LinkClass linkClass;
};

LinkView view_of(const ElementLink& link) {
    if (const Contribution* c = std::get_if<Contribution>(&link.variant))
        return {c->source, c->target, LinkClass::Contribution};
    if (const NeededBy* n = std::get_if<NeededBy>(&link.variant))
        return {n->resource, n->task, LinkClass::NeededBy};
    const Qualification& q = std::get<Qualification>(link.variant);
    return {q.quality, q.subject, LinkClass::Qualification};
}

void check_actor_links(Emitter& e) {
    const Model& m = e.model;
    // E001
    for (const ActorLink& link : m.actorLinks) {
        if (link.kind != ActorLinkKind::IsA) continue;
        const Actor* src = m.find(link.source);
        const Actor* dst = m.find(link.target);
        if (!src || !dst) continue;
        bool roles = src->kind == ActorKind::Role && dst->kind == ActorKind::Role;
        bool generics = src->kind == ActorKind::GenericActor &&
                        dst->kind == ActorKind::GenericActor;
        if (!roles && !generics)
            e.emit("E001", link.id.value,
                   "is-a between " + name_of(m, link.source) + " (" +
                       to_string(src->kind) + ") and " +
                       name_of(m, link.target) + " (" + to_string(dst->kind) +
                       ") is not a role-role or actor-actor pair",
                   {link.source.value, link.target.value});
    }
    // E002 / E003
    auto report_cycles = [&](CycleRelation relation, const char* code,
                             const char* label) {
        for (const auto& cycle : detect_cycles(m, relation)) {
            std::string members;
            for (std::uint32_t id : cycle) {
                if (!members.empty()) members += " -> ";
                members += name_of(m, ActorId{id});
            }
            std::vector<std::uint32_t> related(cycle.begin(), cycle.end());
            e.emit(code, cycle.front(),
                   std::string(label) + " cycle: " + members, related);
        }
    };
    report_cycles(CycleRelation::IsA, "E002", "is-a");
    report_cycles(CycleRelation::ParticipatesIn, "E003", "participates-in");
    // E004: one actor link per unordered pair
    for (std::size_t i = 0; i < m.actorLinks.size(); ++i) {
        const ActorLink& link = m.actorLinks[i];
        for (std::size_t j = 0; j < i; ++j) {
            const ActorLink& earlier = m.actorLinks[j];
            bool samePair =
                (earlier.source == link.source &&
                 earlier.target == link.target) ||
                (earlier.source == link.target &&
                 earlier.target == link.source);
            if (samePair) {
                e.emit("E004", link.id.value,
                       name_of(m, link.source) + " and " +
                           name_of(m, link.target) +
                           " are connected by more than one actor link",
                       {earlier.id.value});
                break;
            }
        }
    }
}

void check_dependencies(Emitter& e) {
    const Model& m = e.model;
    for (const Dependency& dep : m.dependencies) {
        // E005 / E006
        if (dep.dependerElmt &&
            boundary_of(m, *dep.dependerElmt) != std::optional(dep.depender))
            e.emit("E005", dep.id.value,
                   "dependerElmt " + name_of(m, *dep.dependerElmt) +
                       " is not inside the boundary of depender " +
                       name_of(m, dep.depender),
                   {dep.dependerElmt->value});
        if (dep.dependeeElmt &&
            boundary_of(m, *dep.dependeeElmt) != std::optional(dep.dependee))
            e.emit("E006", dep.id.value,
                   "dependeeElmt " + name_of(m, *dep.dependeeElmt) +
                       " is not inside the boundary of dependee " +
                       name_of(m, dep.dependee),
                   {dep.dependeeElmt->value});
        // E007
        if (dep.depender == dep.dependee)
            e.emit("E007", dep.id.value,
                   "depender and dependee are the same actor " +
                       name_of(m, dep.depender));
        // E008: dependerElmt may not be refined or contributed to
        if (dep.dependerElmt) {
            for (const Refinement& refinement : m.refinements)
                if (refinement.parent == *dep.dependerElmt)
                    e.emit("E008", dep.id.value,
                           "dependerElmt " + name_of(m, *dep.dependerElmt) +
                               " is the parent of a refinement",
                           {refinement.id.value});
            for (const ElementLink& link : m.elementLinks) {
                const Contribution* c = std::get_if<Contribution>(&link.variant);
                if (c && c->target == *dep.dependerElmt)
                    e.emit("E008", dep.id.value,
                           "dependerElmt " + name_of(m, *dep.dependerElmt) +
                               " is the target of a contribution",
                           {link.id.value});
            }
        }
        // E016: dependum owned by this dependency and no other
        const IntentionalElement* dependum = m.find(dep.dependum);
        if (dependum) {
            const DependumMarker* marker =
                std::get_if<DependumMarker>(&dependum->owner);
            if (!marker) {
                e.emit("E016", dep.id.value,
                       "dependum " + name_of(m, dep.dependum) +
                           " is a boundary element, not a dedicated dependum",
                       {dep.dependum.value});
            } else if (marker->dependency != dep.id) {
                e.emit("E016", dep.id.value,
                       "dependum " + name_of(m, dep.dependum) +
                           " is shared with another dependency",
                       {dep.dependum.value, marker->dependency.value});
            }
        }
    }
}

void check_refinements(Emitter& e) {
    const Model& m = e.model;
    for (const Refinement& refinement : m.refinements) {
        const IntentionalElement* parent = m.find(refinement.parent);
        if (!parent) continue;
        // E014 (arity)
        if (refinement.op == RefinementOperator::And &&
            refinement.children.size() < 2)
            e.emit("E014", refinement.id.value,
                   "AND-refinement of " + name_of(m, refinement.parent) +
                       " has fewer than two children");
        else if (refinement.children.empty())
            e.emit("E014", refinement.id.value,
                   "refinement of " + name_of(m, refinement.parent) +
                       " has no children");
        std::optional<ActorId> home = boundary_of(m, refinement.parent);
        for (ElementId child : refinement.children) {
            const IntentionalElement* childElmt = m.find(child);
            if (!childElmt) continue;
            // E013 (kinds)
            if (!check_link_matrix(childElmt->kind, parent->kind,
                                   LinkClass::Refinement))
                e.emit("E013", refinement.id.value,
                       "refinement from " + name_of(m, child) + " (" +
                           to_string(childElmt->kind) + ") to " +
                           name_of(m, refinement.parent) + " (" +
                           to_string(parent->kind) + ") is not permitted",
                       {child.value});
            // E010 (same boundary)
            if (!home || boundary_of(m, child) != home)
                e.emit("E010", refinement.id.value,
                       "refinement edge " + name_of(m, child) + " -> " +
                           name_of(m, refinement.parent) +
                           " crosses actor boundaries",
                       {child.value, refinement.parent.value});
        }
    }
    // E015: at most one refinement per parent
    for (std::size_t i = 0; i < m.refinements.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (m.refinements[i].parent == m.refinements[j].parent) {
                e.emit("E015", m.refinements[i].id.value,
                       name_of(m, m.refinements[i].parent) +
                           " is the parent of more than one refinement",
                       {m.refinements[j].id.value});
                break;
            }
    // E009
    for (const auto& cycle : detect_cycles(m, CycleRelation::Refinement)) {
        std::string members;
        for (std::uint32_t id : cycle) {
            if (!members.empty()) members += " -> ";
            members += name_of(m, ElementId{id});
        }
        std::vector<std::uint32_t> related(cycle.begin(), cycle.end());
        e.emit("E009", cycle.front(), "refinement cycle: " + members, related);
    }
}

void check_element_links(Emitter& e) {
    const Model& m = e.model;
    for (const ElementLink& link : m.elementLinks) {
        LinkView v = view_of(link);
        const IntentionalElement* src = m.find(v.source);
        const IntentionalElement* dst = m.find(v.target);
        if (!src || !dst) continue;
        // E012
        if (v.linkClass == LinkClass::Contribution && v.source == v.target)
            e.emit("E012", link.id.value,
                   name_of(m, v.source) + " contributes to itself");
        // E013
        if (!check_link_matrix(src->kind, dst->kind, v.linkClass))
            e.emit("E013", link.id.value,
                   "link from " + name_of(m, v.source) + " (" +
                       to_string(src->kind) + ") to " + name_of(m, v.target) +
                       " (" + to_string(dst->kind) + ") is not permitted",
                   {v.source.value, v.target.value});
        // E010
        std::optional<ActorId> home = boundary_of(m, v.source);
        if (v.source != v.target &&
            (!home || boundary_of(m, v.target) != home))
            e.emit("E010", link.id.value,
                   name_of(m, v.source) + " and " + name_of(m, v.target) +
                       " are not wanted by the same actor",
                   {v.source.value, v.target.value});
    }
    // E011: contribution and qualification may not connect the same pair
    for (std::size_t i = 0; i < m.elementLinks.size(); ++i) {
        LinkView a = view_of(m.elementLinks[i]);
        if (a.linkClass == LinkClass::NeededBy ||
            a.linkClass == LinkClass::Refinement)
            continue;
        for (std::size_t j = 0; j < i; ++j) {
            LinkView b = view_of(m.elementLinks[j]);
            if (b.linkClass == a.linkClass ||
                b.linkClass == LinkClass::NeededBy ||
                b.linkClass == LinkClass::Refinement)
                continue;
            bool samePair = (a.source == b.source && a.target == b.target) ||
                            (a.source == b.target && a.target == b.source);
            if (samePair)
                e.emit("E011", m.elementLinks[i].id.value,
                       name_of(m, a.source) + " and " + name_of(m, a.target) +
                           " are connected by both a contribution and a "
                           "qualification",
                       {m.elementLinks[j].id.value});
        }
    }
}

}  // namespace

std::vector<Diagnostic> validate(const Model& model) {
    Emitter e{model, {}};
    check_actor_links(e);
    check_dependencies(e);
    check_refinements(e);
    check_element_links(e);
    sort_diagnostics(e.diags);
    return e.diags;
}

const std::vector<CatalogEntry>& diagnostic_catalog() {
    static const std::vector<CatalogEntry> catalog = {
        {"E001", "IsAKindMismatch",
         "is-a applies only between pairs of roles or pairs of generic "
         "actors"},
        {"E002", "IsACycle", "the is-a graph must be acyclic"},
        {"E003", "ParticipatesCycle",
         "the participates-in graph must be acyclic"},
        {"E004", "DuplicateActorLink",
         "a pair of actors can be linked by at most one actor link"},
        {"E005", "DependerElmtOwner",
         "a dependerElmt must be wanted by the dependency's depender"},
        {"E006", "DependeeElmtOwner",
         "a dependeeElmt must be wanted by the dependency's dependee"},
        {"E007", "SelfDependency",
         "depender and dependee must be different actors"},
        {"E008", "DependerElmtElaborated",
         "a dependerElmt cannot be refined or contributed to"},
        {"E009", "RefinementCycle", "refinement must not form cycles"},
        {"E010", "CrossActorLink",
         "links between intentional elements apply only within one actor "
         "boundary"},
        {"E011", "ContributionQualificationClash",
         "two elements can be connected by a contribution or a "
         "qualification, but not both"},
        {"E012", "SelfContribution", "a quality cannot contribute to itself"},
        {"E013", "MatrixViolation",
         "the element-link compatibility matrix does not admit this "
         "combination"},
        {"E014", "AndArityTooSmall",
         "an AND-refinement needs at least two children"},
        {"E015", "ParentAlreadyRefined",
         "an element can be the parent of at most one refinement"},
        {"E016", "SharedDependum",
         "each dependency owns its own dependum; dependums are never shared"},
    };
    return catalog;
}

}  // namespace istar
