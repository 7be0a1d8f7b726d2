use serde::{Deserialize, Serialize};

use crate::ir::{serialize_ir, Intent, IntentDocument};
use crate::predicate::{AttrPath, Op, Predicate};

/// Base position of each intent in a report; unknown intents go last.
pub fn intent_priority(name: &str) -> u32 {
    match name {
        "LOCATION" => 0,
        "WEATHER" => 10,
        "OCEAN" => 20,
        "TIDES" => 25,
        "VESSELS_IN_PORT" => 30,
        "EARTHQUAKE" => 40,
        "OIL" => 50,
        _ => 100,
    }
}

/// `cause` explains `effect` when both predicates hold on their intents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalRule {
    pub cause: Predicate,
    pub effect: Predicate,
}

/// Excellent fishing conditions explain a high count of vessels in port.
pub fn default_causal_rules() -> Vec<CausalRule> {
    let eq = |intent: &str, key: &str, value: &str| Predicate {
        attr: AttrPath::new(intent, key),
        op: Op::Eq,
        value: Some(value.to_owned()),
    };
    vec![CausalRule {
        cause: eq("OCEAN", "fishing_condition", "excellent"),
        effect: eq("VESSELS_IN_PORT", "trend", "high"),
    }]
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DiscoursePlan {
    /// Intent ids in reading order.
    pub order: Vec<usize>,
    /// `(cause, effect)` intent ids.
    pub causal: Vec<(usize, usize)>,
}

fn on_intent(p: &Predicate, intent: &Intent) -> bool {
    intent.name() == p.attr.intent && p.holds_with(|path| intent.get(&path.key))
}

fn sort_key(intent: &Intent) -> (u32, String, String) {
    let single = IntentDocument::new(vec![intent.clone()]).map(|d| serialize_ir(&d));
    (
        intent_priority(intent.name()),
        intent.name().to_owned(),
        single.unwrap_or_default(),
    )
}

/// Orders intents by priority, then moves each effect of a causal rule
/// right after its cause.
///
/// The result does not depend on the order intents appear in the input.
pub fn order_discourse(doc: &IntentDocument, rules: &[CausalRule]) -> DiscoursePlan {
    let mut order: Vec<&Intent> = doc.intents().iter().collect();
    order.sort_by_cached_key(|i| sort_key(i));

    let mut causal = Vec::new();
    for rule in rules {
        let cause = order.iter().find(|i| on_intent(&rule.cause, i)).map(|i| i.id);
        let effect = order
            .iter()
            .find(|i| on_intent(&rule.effect, i) && Some(i.id) != cause)
            .map(|i| i.id);
        if let (Some(c), Some(e)) = (cause, effect) {
            let linked = |id| causal.iter().any(|&(a, b)| a == id || b == id);
            if linked(c) || linked(e) {
                continue;
            }
            causal.push((c, e));
        }
    }

    let mut ids: Vec<usize> = order.iter().map(|i| i.id).collect();
    for &(c, e) in &causal {
        ids.retain(|&i| i != e);
        let at = ids.iter().position(|&i| i == c).unwrap() + 1;
        ids.insert(at, e);
    }
    DiscoursePlan { order: ids, causal }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::parse_ir;

    fn names(doc: &IntentDocument, plan: &DiscoursePlan) -> Vec<String> {
        plan.order
            .iter()
            .map(|&id| doc.intent(id).unwrap().name().to_owned())
            .collect()
    }

    #[test]
    fn priority_order() {
        let doc = parse_ir(
            r#"OIL(level="1"); VESSELS_IN_PORT(quantity="3"); WEATHER(condition="sunny"); LOCATION(city="Santos")"#,
        )
        .unwrap();
        let plan = order_discourse(&doc, &default_causal_rules());
        assert_eq!(names(&doc, &plan), ["LOCATION", "WEATHER", "VESSELS_IN_PORT", "OIL"]);
        assert!(plan.causal.is_empty());
    }

    #[test]
    fn effect_follows_cause() {
        let doc = parse_ir(
            r#"VESSELS_IN_PORT(quantity="280",trend="high"); TIDES(high_tide="1m"); OCEAN(fishing_condition="excellent"); LOCATION(city="Rio de Janeiro")"#,
        )
        .unwrap();
        let plan = order_discourse(&doc, &default_causal_rules());
        assert_eq!(names(&doc, &plan), ["LOCATION", "OCEAN", "VESSELS_IN_PORT", "TIDES"]);
        assert_eq!(plan.causal, vec![(2, 0)]);
    }

    #[test]
    fn no_link_without_both_conditions() {
        let doc = parse_ir(r#"OCEAN(fishing_condition="good"); VESSELS_IN_PORT(quantity="280",trend="high")"#).unwrap();
        assert!(order_discourse(&doc, &default_causal_rules()).causal.is_empty());
    }
}
