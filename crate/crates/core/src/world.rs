//! A deterministic text household for exercising plan execution.
//!
//! The agent stands in one room and can interact with anything located in
//! that room or held in one of its two hands. Skills mirror common
//! household simulator verbs: `walk_to`, `open`, `close`, `grab`, `put_on`,
//! `put_in` and `heat`. Heating requires the item to sit inside a heater
//! such as a microwave.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::ir::{self, Binding, Expr, GroundAtom, StateView};
use crate::number::Number;

pub const SKILLS: &[&str] = &[
    "walk_to", "open", "close", "grab", "put_on", "put_in", "heat",
];
pub const HANDS: usize = 2;

/// Where an entity is. Exactly one per entity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// Standing in a room.
    At(String),
    /// Inside a container entity.
    In(String),
    /// On a surface entity.
    On(String),
    /// In the agent's hand with this index.
    Held(usize),
}

/// Capabilities that gate skills.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trait {
    Container,
    Surface,
    Openable,
    Grabbable,
    Heater,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    pub class: String,
    #[serde(default)]
    pub traits: BTreeSet<Trait>,
    /// Boolean properties such as `is_open` and `is_heated`.
    #[serde(default)]
    pub properties: BTreeMap<String, bool>,
    pub location: Placement,
}

impl Entity {
    pub fn has(&self, t: Trait) -> bool {
        self.traits.contains(&t)
    }

    pub fn flag(&self, name: &str) -> bool {
        self.properties.get(name).copied().unwrap_or(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Room {
    pub name: String,
    #[serde(default)]
    pub adjacent: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Agent {
    pub room: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WorldState {
    pub rooms: Vec<Room>,
    pub agent: Agent,
    #[serde(default)]
    pub entities: Vec<Entity>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WorldError {
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("unknown skill `{0}`")]
    UnknownSkill(String),
    #[error("`{skill}` takes {expected} argument(s), got {got}")]
    Arity {
        skill: String,
        expected: usize,
        got: usize,
    },
    #[error("invalid world: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkillResult {
    pub success: bool,
    pub observation: String,
    /// One line per changed fact; empty on failure.
    pub delta: Vec<String>,
}

fn on_off(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn describe_placement(p: &Placement) -> String {
    match p {
        Placement::At(r) => format!("in the {r}"),
        Placement::In(c) => format!("inside {c}"),
        Placement::On(s) => format!("on {s}"),
        Placement::Held(_) => "in your hand".to_string(),
    }
}

impl WorldState {
    pub fn from_json(text: &str) -> Result<Self, WorldError> {
        let w: WorldState =
            serde_json::from_str(text).map_err(|e| WorldError::Invalid(e.to_string()))?;
        w.check()?;
        Ok(w)
    }

    pub fn entity(&self, id: &str) -> Option<&Entity> {
        self.entities.iter().find(|e| e.id == id)
    }

    fn entity_mut(&mut self, id: &str) -> &mut Entity {
        self.entities
            .iter_mut()
            .find(|e| e.id == id)
            .expect("entity looked up before mutation")
    }

    fn room(&self, name: &str) -> Option<&Room> {
        self.rooms.iter().find(|r| r.name == name)
    }

    /// Hand contents, indexed by hand.
    pub fn hands(&self) -> [Option<&str>; HANDS] {
        let mut out = [None; HANDS];
        for e in &self.entities {
            if let Placement::Held(h) = e.location {
                if h < HANDS {
                    out[h] = Some(e.id.as_str());
                }
            }
        }
        out
    }

    /// Room an entity is ultimately in; `None` while held.
    pub fn room_of(&self, id: &str) -> Option<&str> {
        let mut cur = self.entity(id)?;
        for _ in 0..=self.entities.len() {
            match &cur.location {
                Placement::At(r) => return Some(r),
                Placement::Held(_) => return Some(&self.agent.room),
                Placement::In(p) | Placement::On(p) => cur = self.entity(p)?,
            }
        }
        None
    }

    /// Held, or inside a held entity.
    fn is_carried(&self, id: &str) -> bool {
        let mut cur = self.entity(id);
        while let Some(e) = cur {
            match &e.location {
                Placement::Held(_) => return true,
                Placement::At(_) => return false,
                Placement::In(p) | Placement::On(p) => cur = self.entity(p),
            }
        }
        false
    }

    /// Check structural invariants.
    pub fn check(&self) -> Result<(), WorldError> {
        let bad = |m: String| Err(WorldError::Invalid(m));
        let mut ids = BTreeSet::new();
        for e in &self.entities {
            if !ids.insert(e.id.as_str()) {
                return bad(format!("entity `{}` declared twice", e.id));
            }
        }
        if self.room(&self.agent.room).is_none() {
            return bad(format!("agent room `{}` is not declared", self.agent.room));
        }
        for r in &self.rooms {
            if let Some(a) = r.adjacent.iter().find(|a| self.room(a).is_none()) {
                return bad(format!(
                    "room `{}` is adjacent to unknown room `{a}`",
                    r.name
                ));
            }
        }
        let mut hands = [false; HANDS];
        for e in &self.entities {
            match &e.location {
                Placement::At(r) if self.room(r).is_none() => {
                    return bad(format!("`{}` is in unknown room `{r}`", e.id))
                }
                Placement::At(_) => {}
                Placement::In(c) | Placement::On(c) => {
                    let need = if matches!(e.location, Placement::In(_)) {
                        Trait::Container
                    } else {
                        Trait::Surface
                    };
                    match self.entity(c) {
                        None => {
                            return bad(format!("`{}` is placed in unknown entity `{c}`", e.id))
                        }
                        Some(p) if !p.has(need) => {
                            return bad(format!(
                                "`{}` is placed in `{c}`, which cannot hold things that way",
                                e.id
                            ))
                        }
                        Some(_) => {}
                    }
                    if self.room_of(&e.id).is_none() {
                        return bad(format!("placement of `{}` is cyclic", e.id));
                    }
                }
                Placement::Held(h) => {
                    if *h >= HANDS || hands[*h] {
                        return bad(format!("hand {h} cannot hold `{}`", e.id));
                    }
                    hands[*h] = true;
                }
            }
        }
        Ok(())
    }

    fn reachable(&self, id: &str) -> Result<(), String> {
        let e = self.entity(id).expect("caller checked the id");
        if self.is_carried(id) {
            return Ok(());
        }
        if self.room_of(id) != Some(self.agent.room.as_str()) {
            return Err(format!("{id} is not in the {}", self.agent.room));
        }
        if let Placement::In(c) = &e.location {
            let container = self.entity(c).expect("checked world");
            if container.has(Trait::Openable) && !container.flag("is_open") {
                return Err(format!("{id} is inside {c}, which is closed"));
            }
        }
        Ok(())
    }

    /// Apply one skill. Unknown ids and skills are errors; violated skill
    /// preconditions are unsuccessful results with an explanation and the
    /// state unchanged.
    pub fn apply_skill(
        &self,
        skill: &str,
        args: &[String],
    ) -> Result<(SkillResult, WorldState), WorldError> {
        let arity = match skill {
            "walk_to" | "open" | "close" | "grab" | "heat" => 1,
            "put_on" | "put_in" => 2,
            _ => return Err(WorldError::UnknownSkill(skill.to_string())),
        };
        if args.len() != arity {
            return Err(WorldError::Arity {
                skill: skill.to_string(),
                expected: arity,
                got: args.len(),
            });
        }
        for a in args {
            let is_room = skill == "walk_to" && self.room(a).is_some();
            if !is_room && self.entity(a).is_none() {
                return Err(WorldError::UnknownEntity(a.clone()));
            }
        }
        let fail = |why: String| {
            Ok((
                SkillResult {
                    success: false,
                    observation: format!("Cannot {skill} {}: {why}.", args.join(", ")),
                    delta: Vec::new(),
                },
                self.clone(),
            ))
        };
        let mut next = self.clone();
        let mut delta = Vec::new();
        let x = args[0].as_str();

        let observation = match skill {
            "walk_to" => {
                let target = match self.room(x) {
                    Some(r) => r.name.clone(),
                    None => match self.room_of(x) {
                        Some(r) => r.to_string(),
                        None => return fail(format!("{x} has no location")),
                    },
                };
                let here = self.room(&self.agent.room).expect("checked world");
                if target != here.name && !here.adjacent.contains(&target) {
                    return fail(format!("the {target} is not adjacent to the {}", here.name));
                }
                if target != self.agent.room {
                    delta.push(format!("agent: room {} -> {target}", self.agent.room));
                    next.agent.room = target.clone();
                }
                format!("You walk to {x}. You are in the {target}.")
            }
            "open" | "close" => {
                let opening = skill == "open";
                let e = self.entity(x).expect("checked");
                if !e.has(Trait::Openable) {
                    return fail(format!("{x} cannot be opened or closed"));
                }
                if let Err(why) = self.reachable(x) {
                    return fail(why);
                }
                if e.flag("is_open") == opening {
                    return fail(format!(
                        "{x} is already {}",
                        if opening { "open" } else { "closed" }
                    ));
                }
                next.entity_mut(x)
                    .properties
                    .insert("is_open".to_string(), opening);
                delta.push(format!(
                    "{x}: is_open {} -> {}",
                    on_off(!opening),
                    on_off(opening)
                ));
                format!("You {skill} {x}.")
            }
            "grab" => {
                let e = self.entity(x).expect("checked");
                if !e.has(Trait::Grabbable) {
                    return fail(format!("{x} cannot be picked up"));
                }
                if matches!(e.location, Placement::Held(_)) {
                    return fail(format!("you are already holding {x}"));
                }
                if let Err(why) = self.reachable(x) {
                    return fail(why);
                }
                let Some(hand) = self.hands().iter().position(Option::is_none) else {
                    return fail("both hands are full".to_string());
                };
                delta.push(format!("{x}: {} -> held", describe_placement(&e.location)));
                next.entity_mut(x).location = Placement::Held(hand);
                format!("You grab {x}.")
            }
            "put_on" | "put_in" => {
                let y = args[1].as_str();
                let e = self.entity(x).expect("checked");
                let dest = self.entity(y).expect("checked");
                if !matches!(e.location, Placement::Held(_)) {
                    return fail(format!("you are not holding {x}"));
                }
                if x == y {
                    return fail(format!("{x} cannot hold itself"));
                }
                if self.is_carried(y) {
                    return fail(format!("{y} must be set down first"));
                }
                if let Err(why) = self.reachable(y) {
                    return fail(why);
                }
                let (need, place) = if skill == "put_on" {
                    (Trait::Surface, Placement::On(y.to_string()))
                } else {
                    (Trait::Container, Placement::In(y.to_string()))
                };
                if !dest.has(need) {
                    let what = if need == Trait::Surface {
                        "a surface"
                    } else {
                        "a container"
                    };
                    return fail(format!("{y} is not {what}"));
                }
                if need == Trait::Container && dest.has(Trait::Openable) && !dest.flag("is_open") {
                    return fail(format!("{y} is closed"));
                }
                delta.push(format!("{x}: held -> {}", describe_placement(&place)));
                next.entity_mut(x).location = place;
                format!(
                    "You put {x} {} {y}.",
                    if skill == "put_on" { "on" } else { "in" }
                )
            }
            "heat" => {
                let e = self.entity(x).expect("checked");
                let Placement::In(h) = &e.location else {
                    return fail(format!("{x} must be inside a heater"));
                };
                let heater = self.entity(h).expect("checked world");
                if !heater.has(Trait::Heater) {
                    return fail(format!("{h} cannot heat things"));
                }
                if let Err(why) = self.reachable(h) {
                    return fail(why);
                }
                if !e.flag("is_heated") {
                    next.entity_mut(x)
                        .properties
                        .insert("is_heated".to_string(), true);
                    delta.push(format!("{x}: is_heated false -> true"));
                }
                format!("You heat {x} in {h}. It is hot now.")
            }
            _ => unreachable!("arity table covers every skill"),
        };
        Ok((
            SkillResult {
                success: true,
                observation,
                delta,
            },
            next,
        ))
    }

    /// Natural-language description. In agent-centric mode only the
    /// agent's room and what it carries are described.
    pub fn describe_state(&self, agent_centric: bool) -> String {
        let mut entities: Vec<&Entity> = self
            .entities
            .iter()
            .filter(|e| !agent_centric || self.room_of(&e.id) == Some(self.agent.room.as_str()))
            .collect();
        if entities.is_empty() {
            return "Nothing here.".to_string();
        }
        entities.sort_by(|a, b| a.id.cmp(&b.id));
        let mut out = String::new();
        let _ = writeln!(out, "You are in the {}.", self.agent.room);
        for e in entities {
            let mut facts = vec![describe_placement(&e.location)];
            if e.has(Trait::Openable) {
                facts.push(if e.flag("is_open") { "open" } else { "closed" }.to_string());
            }
            for (k, v) in &e.properties {
                if k != "is_open" && *v {
                    facts.push(k.trim_start_matches("is_").to_string());
                }
            }
            let _ = writeln!(out, "{} ({}): {}.", e.id, e.class, facts.join(", "));
        }
        out
    }

    /// Evaluate a goal over world facts. Recognized atoms: any boolean
    /// property `(is_open x)`, `(on x y)`, `(inside x y)`, `(holding x)` and
    /// `(agent_in room)`.
    pub fn check_goal(&self, goal: &Expr) -> Result<bool, ir::EvalError> {
        ir::eval_expr(goal, &Binding::new(), self)
    }
}

impl StateView for WorldState {
    fn holds(&self, atom: &GroundAtom) -> bool {
        let arg = |i: usize| atom.args.get(i).map(String::as_str);
        match (atom.fluent.as_str(), atom.args.len()) {
            ("on", 2) => self
                .entity(&atom.args[0])
                .is_some_and(|e| e.location == Placement::On(atom.args[1].clone())),
            ("inside" | "in", 2) => self
                .entity(&atom.args[0])
                .is_some_and(|e| e.location == Placement::In(atom.args[1].clone())),
            ("holding", 1) => self
                .entity(&atom.args[0])
                .is_some_and(|e| matches!(e.location, Placement::Held(_))),
            ("agent_in", 1) => arg(0) == Some(self.agent.room.as_str()),
            (prop, 1) => self.entity(&atom.args[0]).is_some_and(|e| e.flag(prop)),
            _ => false,
        }
    }

    fn value(&self, _atom: &GroundAtom) -> Option<Number> {
        None
    }
}
