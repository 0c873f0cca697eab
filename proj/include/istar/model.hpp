#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace istar {

// ---------------------------------------------------------------------------
// Identifiers
//
// All entities in a Model share one monotonically increasing numeric id
// space; the typed wrappers keep references from crossing categories.
// Ids are stable under formatting and interchange round-trips.
// ---------------------------------------------------------------------------

template <class Tag>
struct Id {
    std::uint32_t value = 0;
    friend bool operator==(Id, Id) = default;
    friend auto operator<=>(Id, Id) = default;
};

struct ActorTag {};
struct ElementTag {};
struct ActorLinkTag {};
struct RefinementTag {};
struct ElementLinkTag {};
struct DependencyTag {};

using ActorId = Id<ActorTag>;
using ElementId = Id<ElementTag>;
using ActorLinkId = Id<ActorLinkTag>;
using RefinementId = Id<RefinementTag>;
using ElementLinkId = Id<ElementLinkTag>;
using DependencyId = Id<DependencyTag>;

// ---------------------------------------------------------------------------
// Nodes
// ---------------------------------------------------------------------------

enum class ActorKind { GenericActor, Agent, Role };
enum class ElementKind { Goal, Quality, Task, Resource };

const char* to_string(ActorKind kind);
const char* to_string(ElementKind kind);

struct Actor {
    ActorId id;
    std::string name;
    ActorKind kind = ActorKind::GenericActor;
};

// Marks an intentional element as the dependum of the named dependency,
// living outside every actor boundary.
struct DependumMarker {
    DependencyId dependency;
    friend bool operator==(DependumMarker, DependumMarker) = default;
};

using ElementOwner = std::variant<ActorId, DependumMarker>;

struct IntentionalElement {
    ElementId id;
    std::string name;
    ElementKind kind = ElementKind::Goal;
    ElementOwner owner;
};

// ---------------------------------------------------------------------------
// Links
// ---------------------------------------------------------------------------

enum class ActorLinkKind { IsA, ParticipatesIn };

const char* to_string(ActorLinkKind kind);

struct ActorLink {
    ActorLinkId id;
    ActorId source;
    ActorId target;
    ActorLinkKind kind = ActorLinkKind::IsA;
};

enum class RefinementOperator { And, Or };

struct Refinement {
    RefinementId id;
    ElementId parent;
    std::vector<ElementId> children;  // declaration order
    RefinementOperator op = RefinementOperator::And;
};

enum class ContributionLevel { Make, Help, Hurt, Break };

const char* to_string(ContributionLevel level);

struct Contribution {
    ElementId source;
    ElementId target;  // kind Quality
    ContributionLevel level = ContributionLevel::Help;
};

struct NeededBy {
    ElementId resource;
    ElementId task;
};

struct Qualification {
    ElementId quality;
    ElementId subject;  // Goal, Task, or Resource
};

struct ElementLink {
    ElementLinkId id;
    std::variant<Contribution, NeededBy, Qualification> variant;
};

struct Dependency {
    DependencyId id;
    ActorId depender;
    std::optional<ElementId> dependerElmt;
    ElementId dependum;  // owned by this dependency
    ActorId dependee;
    std::optional<ElementId> dependeeElmt;
};

// ---------------------------------------------------------------------------
// Source spans (populated by the parser, absent for programmatic models)
// ---------------------------------------------------------------------------

struct SourceSpan {
    std::string file;
    int startLine = 1, startCol = 1;  // 1-based, inclusive
    int endLine = 1, endCol = 1;
    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

// ---------------------------------------------------------------------------
// Model
//
// A plain value: copyable, shareable for concurrent reads. The checked
// mutation path is the add_* functions below; the collections are public
// so that importers and tests can assemble models the constructors would
// refuse, which the validator then diagnoses.
// ---------------------------------------------------------------------------

struct Model {
    std::vector<Actor> actors;
    std::vector<IntentionalElement> elements;
    std::vector<ActorLink> actorLinks;
    std::vector<Refinement> refinements;
    std::vector<ElementLink> elementLinks;
    std::vector<Dependency> dependencies;
    std::map<std::uint32_t, SourceSpan> sourceMap;

    std::uint32_t nextId = 1;

    std::uint32_t freshId() { return nextId++; }

    const Actor* find(ActorId id) const;
    const IntentionalElement* find(ElementId id) const;
    const Refinement* find(RefinementId id) const;
    const ElementLink* find(ElementLinkId id) const;
    const Dependency* find(DependencyId id) const;
    const ActorLink* find(ActorLinkId id) const;
};

// ---------------------------------------------------------------------------
// Checked construction
//
// Local, single-edge well-formedness (kinds, ownership, arity, duplicates)
// fails fast here. Whole-graph constraints (cycles, dependerElmt
// elaboration) are the validator's job so that models can be built in any
// statement order.
// ---------------------------------------------------------------------------

enum class ModelErrorCode {
    EmptyName,
    UnknownActor,
    UnknownElement,
    SelfLink,
    IsAKindMismatch,
    DuplicateActorLink,
    ParentAlreadyRefined,
    AndArityTooSmall,
    KindNotRefinable,
    CrossActorLink,
    DuplicateChild,
    SelfChild,
    MatrixViolation,
    ContributionQualificationClash,
    SelfContribution,
    SelfDependency,
    ElmtOwnerMismatch,
};

const char* to_string(ModelErrorCode code);

struct ModelError {
    ModelErrorCode code;
    std::string message;
};

template <class T>
class Result {
public:
    Result(T value) : value_(std::move(value)) {}
    Result(ModelError error) : error_(std::move(error)) {}

    explicit operator bool() const { return !error_.has_value(); }
    const T& operator*() const { return *value_; }
    const ModelError& error() const { return *error_; }

private:
    std::optional<T> value_;
    std::optional<ModelError> error_;
};

Result<ActorId> add_actor(Model& model, std::string name, ActorKind kind);

Result<ElementId> add_element(Model& model, ActorId owner, std::string name,
                              ElementKind kind);

Result<ActorLinkId> add_actor_link(Model& model, ActorId source, ActorId target,
                                   ActorLinkKind kind);

Result<RefinementId> add_refinement(Model& model, ElementId parent,
                                    const std::vector<ElementId>& children,
                                    RefinementOperator op);

Result<ElementLinkId> add_element_link(
    Model& model, std::variant<Contribution, NeededBy, Qualification> link);

// Creates a fresh dependum element owned by the new dependency; dependums
// are never shared between dependencies.
Result<DependencyId> add_dependency(Model& model, ActorId depender,
                                    std::optional<ElementId> dependerElmt,
                                    std::string dependumName,
                                    ElementKind dependumKind, ActorId dependee,
                                    std::optional<ElementId> dependeeElmt);

}  // namespace istar
