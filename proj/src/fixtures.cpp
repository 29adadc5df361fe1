#include "atch/fixtures.hpp"

#include <cstdio>
#include <memory>

namespace atch::fixtures {

namespace {

Timestamp ts(std::string_view text) { return Timestamp::parse_or_throw(text); }

class Builder {
public:
    Builder() : now_(std::make_shared<Timestamp>(ts("2024-01-01T00:00:00Z"))), store_(options(now_)) {}

    void at(std::string_view tx) { *now_ = ts(tx); }

    // Fixtures share people; a vertex already present is reused.
    void vertices(std::initializer_list<std::string_view> ids) {
        for (auto id : ids) {
            if (!store_.snapshot().resolves(id)) store_.add_vertex(Vertex{std::string(id), {}});
        }
    }

    void edge(std::string id, std::vector<Participant> participants, Attributes attributes, TimeInterval valid,
              double confidence = 1.0, std::optional<ClaimTag> claim = std::nullopt) {
        Hyperedge e;
        e.id = std::move(id);
        e.participants = std::move(participants);
        e.attributes = std::move(attributes);
        e.valid_time = valid;
        e.confidence = confidence;
        e.claim = std::move(claim);
        store_.add_edge(std::move(e));
    }

    void link(std::string cause, std::string effect, std::string mechanism, double confidence,
              LinkKind kind = LinkKind::Causes) {
        CausalLink l;
        l.cause = std::move(cause);
        l.effect = std::move(effect);
        l.mechanism = std::move(mechanism);
        l.link_confidence = confidence;
        l.kind = kind;
        store_.add_link(std::move(l));
    }

    Store& store() { return store_; }
    Store finish() { return std::move(store_); }

private:
    static StoreOptions options(std::shared_ptr<Timestamp> now) {
        StoreOptions o;
        o.clock = [now] { return *now; };
        return o;
    }

    std::shared_ptr<Timestamp> now_;
    Store store_;
};

Participant as(std::string ref, std::string role) { return {std::move(ref), std::move(role)}; }
Participant p(std::string ref) { return {std::move(ref), std::nullopt}; }

TimeInterval from(std::string_view start) { return {ts(start), Timestamp::infinity()}; }
TimeInterval span(std::string_view start, std::string_view end) { return {ts(start), ts(end)}; }

void add_meetings(Builder& b) {
    b.at("2024-03-18T11:00:00Z");
    b.vertices({"Alice", "Bob", "Carol", "Room101", "Room102"});
    b.edge("team_meeting",
           {as("Alice", "attendee"), as("Bob", "attendee"), as("Carol", "attendee"), as("Room101", "room")},
           {{"kind", std::string("meeting")}, {"productive", true}, {"label", std::string("team meeting")}},
           span("2024-03-18T09:00:00Z", "2024-03-18T10:00:00Z"), 0.9);
    b.edge("meeting_pair", {as("Alice", "attendee"), as("Bob", "attendee"), as("Room102", "room")},
           {{"kind", std::string("meeting")}, {"productive", true}, {"label", std::string("one-to-one")}},
           span("2024-02-05T14:00:00Z", "2024-02-05T14:30:00Z"), 0.7);
    b.edge("meeting_standup",
           {as("Alice", "attendee"), as("Bob", "attendee"), as("Carol", "attendee"), as("Room102", "room")},
           {{"kind", std::string("meeting")}, {"productive", false}, {"label", std::string("standup")}},
           span("2024-03-19T09:00:00Z", "2024-03-19T09:15:00Z"), 0.95);
}

void add_employment(Builder& b) {
    b.at("2020-01-06T09:00:00Z");
    b.vertices({"Alice", "AcmeCorp"});
    b.edge("emp_engineer", {as("Alice", "employee"), as("AcmeCorp", "employer")},
           {{"kind", std::string("employment")}, {"status", std::string("engineer")}}, from("2020-01-06T00:00:00Z"));
    b.at("2023-07-01T09:00:00Z");
    b.store().terminate("emp_engineer", ts("2023-06-30T23:59:59Z"));
    b.edge("emp_manager", {as("Alice", "employee"), as("AcmeCorp", "employer")},
           {{"kind", std::string("employment")}, {"status", std::string("manager")}}, from("2023-07-01T00:00:00Z"),
           0.98);
}

void add_supply_chain(Builder& b) {
    b.at("2024-01-02T12:00:00Z");
    b.vertices({"SupplierX", "Microchips", "FactoryZ"});
    b.edge("supply_chain", {as("SupplierX", "supplier"), as("Microchips", "part"), as("FactoryZ", "plant")},
           {{"kind", std::string("shipment")}, {"lead_time_days", std::int64_t{21}}}, from("2024-01-02T00:00:00Z"),
           0.85);
}

void add_it_incident(Builder& b) {
    b.at("2024-03-20T09:00:00Z");
    b.vertices({"TechJones", "PrintDriver", "2ndFloorPrinters", "TicketT-4021", "WindowsUpdate", "DomainController",
                "GroupPolicy", "AccountingTeam", "PrintFailure", "2ndFloorSubnet"});
    b.edge("driver_push_e1",
           {p("TechJones"), p("PrintDriver"), p("2ndFloorPrinters"), p("TicketT-4021")},
           {{"change_type", std::string("driver_update")},
            {"reason", std::string("tray_select_bug")},
            {"label", std::string("driver push")}},
           from("2024-02-26T10:00:00Z"), 0.95);
    b.edge("windows_update_e2", {p("WindowsUpdate"), p("DomainController"), p("GroupPolicy")},
           {{"update_id", std::string("KB5034763")},
            {"method", std::string("scheduled")},
            {"label", std::string("update")}},
           span("2024-03-18T01:00:00Z", "2024-03-18T03:00:00Z"), 0.99);
    b.edge("print_failure_e3", {p("AccountingTeam"), p("PrintFailure"), p("2ndFloorSubnet")},
           {{"scope", std::string("partial")},
            {"affected", std::string("2nd_floor_only")},
            {"label", std::string("failure")}},
           span("2024-03-18T08:00:00Z", "2024-03-18T15:30:00Z"), 0.78);
    b.link("driver_push_e1", "windows_update_e2", "conflicted_with", 0.9);
    b.link("windows_update_e2", "print_failure_e3", "caused", 0.85);
}

void add_malpractice(Builder& b) {
    b.at("2024-03-05T10:00:00Z");
    b.vertices({"DrSmith", "PatientDoe", "Warfarin", "Bleeding", "MedicalBoard"});
    b.edge("prescription", {as("DrSmith", "Doctor"), as("Warfarin", "Drug"), as("PatientDoe", "patient")},
           {{"dose_mg", std::int64_t{10}}, {"label", std::string("prescription")}}, from("2024-03-01T00:00:00Z"),
           0.73);
    b.at("2024-04-12T10:00:00Z");
    b.edge("reaction", {as("PatientDoe", "patient"), as("Warfarin", "Drug"), as("Bleeding", "symptom")},
           {{"severity", std::string("severe")}, {"label", std::string("reaction")}}, from("2024-04-10T00:00:00Z"),
           0.95);
    b.link("prescription", "reaction", "adverse_drug_reaction", 0.89);
    b.at("2024-08-01T10:00:00Z");
    b.edge("malpractice_finding",
           {as("MedicalBoard", "reviewer"), as("DrSmith", "Doctor"), as("PatientDoe", "patient")},
           {{"outcome", std::string("negligence")}, {"label", std::string("finding")}}, from("2024-08-01T00:00:00Z"),
           0.62);
    b.link("reaction", "malpractice_finding", "standard_of_care_review", 0.78);
}

}  // namespace

Store meeting() {
    Builder b;
    add_meetings(b);
    return b.finish();
}

Store it_incident() {
    Builder b;
    add_it_incident(b);
    return b.finish();
}

Store malpractice() {
    Builder b;
    add_malpractice(b);
    return b.finish();
}

Store benchmark() {
    Builder b;
    add_employment(b);
    add_supply_chain(b);
    add_meetings(b);
    add_it_incident(b);
    add_malpractice(b);
    return b.finish();
}

Store tickets() {
    Builder b;
    b.at("2024-03-18T12:00:00Z");
    b.vertices({"KB5034763", "PrintFailure", "PrintSuccess"});
    const char* departments[] = {"Accounting", "Sales", "Legal", "Support"};
    const char* builds[] = {"22631.3155", "22621.3155", "19045.4046"};
    const char* printers[] = {"HP-M607", "Canon-C5840", "Brother-L6200", "Xerox-B415", "Lexmark-MS826"};
    for (int i = 0; i < 40; ++i) {
        bool failure = i < 20;
        int k = i % 20;
        char id[16];
        std::snprintf(id, sizeof id, "T-%02d", i + 1);
        b.vertices({id});
        Attributes attrs{
            {"driver_version", std::string(failure ? "6.1" : "8.3")},
            {"department", std::string(departments[k % 4])},
            {"os_build", std::string(builds[k % 3])},
            {"printer_model", std::string(printers[(k * 7) % 5])},
            {"site", std::string(k < (failure ? 14 : 8) ? "HQ" : "Branch")},
        };
        constexpr std::int64_t minute = 60'000'000;
        Timestamp start(ts("2024-03-18T08:00:00Z").micros() + i * 15 * minute);
        TimeInterval valid{start, Timestamp(start.micros() + 120 * minute)};
        b.edge(std::string("ticket_") + id, {p("KB5034763"), p(failure ? "PrintFailure" : "PrintSuccess"), p(id)},
               std::move(attrs), valid, failure ? kTicketFailureConfidence : kTicketSuccessConfidence,
               ClaimTag{std::string(kTicketProposition), failure ? Polarity::Supports : Polarity::Refutes});
    }
    return b.finish();
}

Store octonary() {
    Builder b;
    b.at("2024-03-18T12:00:00Z");
    b.vertices({"Tech", "Ticket", "Client", "Error", "Device", "Resolution", "Outcome", "Duration"});
    b.edge("support_event",
           {p("Tech"), p("Ticket"), p("Client"), p("Error"), p("Device"), p("Resolution"), p("Outcome"), p("Duration")},
           {{"kind", std::string("support_resolution")}}, from("2024-03-18T08:00:00Z"), 0.9);
    return b.finish();
}

Store inhibitor() {
    Builder b;
    b.at("2024-01-01T00:00:00Z");
    b.vertices({"Tweety", "Flight", "BrokenWing"});
    b.edge("can_fly", {as("Tweety", "bird"), as("Flight", "ability")},
           {{"species", std::string("canary")}, {"label", std::string("can fly")}}, from("2024-01-01T00:00:00Z"), 0.95);
    b.at("2024-03-01T00:00:00Z");
    b.edge("broken_wing", {as("Tweety", "bird"), as("BrokenWing", "injury")}, {{"label", std::string("broken wing")}},
           span("2024-03-01T00:00:00Z", "2024-04-15T00:00:00Z"));
    b.link("broken_wing", "can_fly", "disables", 1.0, LinkKind::Inhibits);
    return b.finish();
}

Store psu() {
    Builder b;
    b.at("2024-05-01T00:00:00Z");
    b.vertices({"Grid", "PSU", "Motherboard"});
    b.edge("power_surge", {p("Grid"), p("PSU")}, {{"label", std::string("power surge")}}, from("2024-05-01T00:00:00Z"));
    b.edge("psu_failure", {p("PSU")}, {{"surge_protector", true}, {"label", std::string("PSU failure")}},
           from("2024-05-01T00:00:01Z"));
    b.edge("motherboard_short", {p("PSU"), p("Motherboard")}, {{"label", std::string("motherboard short")}},
           from("2024-05-01T00:00:02Z"));
    b.link("power_surge", "psu_failure", "overvoltage", 0.9);
    b.link("psu_failure", "motherboard_short", "arc_discharge", 0.8);
    ContextRule rule;
    rule.id = "surge_protection";
    rule.conditions.push_back({RuleSubject::Cause, AttrPredicate{"surge_protector", CompareOp::Eq, true}});
    rule.inhibition_strength = 0.7;
    b.store().add_context_rule(std::move(rule));
    return b.finish();
}

const std::vector<Named>& all() {
    static const std::vector<Named> list{
        {"meeting", meeting},     {"it_incident", it_incident}, {"malpractice", malpractice},
        {"benchmark", benchmark}, {"tickets", tickets},         {"octonary", octonary},
        {"inhibitor", inhibitor}, {"psu", psu},
    };
    return list;
}

}  // namespace atch::fixtures
