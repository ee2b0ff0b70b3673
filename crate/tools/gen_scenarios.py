#!/usr/bin/env python3
"""Write the bundled scenarios (scenario.json and script.json).

Transcripts are produced from the scripts by recording:

    adaplan scenario NAME --mode record --out-dir /tmp/NAME

which rewrites data/scenarios/NAME/transcript.json.
"""

import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "data" / "scenarios"
BLOCKS_DOMAIN = "../../benchmarks/blocksworld/domain.pddl"
GRIPPERS_DOMAIN = "../../benchmarks/grippers/domain.pddl"
HOUSEHOLD_DOMAIN = "../../domains/household.pddl"

FRIDGE_RULE = (
    "For problems involving the fridge, append a goal to close the fridge, "
    "even if not explicitly stated."
)

ACCEPT = {"critic": {"content": json.dumps({"score": 0.9, "feedback": "consistent with the task"})}}

BLOCKS_TEXT = "Blocks on a table. A robot hand can pick up a clear block, put it down, stack it on a clear block, or unstack it."
HOUSEHOLD_TEXT = (
    "A household robot can open and close containers such as the fridge, grab items from open containers, "
    "heat the item it holds, and put items on surfaces such as the kitchen table."
)


def text(content):
    return {"content": content}


def call(cid, name, **args):
    return {"content": "", "tool_calls": [{"id": cid, "name": name, "arguments": args}]}


def two_blocks(extra_objects=(), extra_init=()):
    objects = [{"name": "b1", "type": "block"}, {"name": "b2", "type": "block"}] + list(extra_objects)
    init = ["(ontable b1)", "(ontable b2)", "(clear b1)", "(clear b2)", "(handempty)"] + list(extra_init)
    return json.dumps({"objects": objects, "init": init})


def numbered(lines):
    return "\n".join(f"{i}. {line}" for i, line in enumerate(lines, 1))


def goal(expr):
    return text(json.dumps({"goal": expr}))


def write(name, scenario, replies, fallback=None):
    d = OUT / name
    d.mkdir(parents=True, exist_ok=True)
    scenario = {"name": name, **scenario}
    script = {"replies": replies, "fallback": {**ACCEPT, **(fallback or {})}}
    (d / "scenario.json").write_text(json.dumps(scenario, indent=2) + "\n")
    (d / "script.json").write_text(json.dumps(script, indent=2) + "\n")


def blocks_task(name, goal_text, init_text="Two blocks, b1 and b2, are on the table. Both are clear and the hand is empty."):
    return {"name": name, "domain": BLOCKS_TEXT, "init": init_text, "goal": goal_text}


def household_init(item):
    return json.dumps(
        {
            "objects": [
                {"name": item, "type": "item"},
                {"name": "fridge_305", "type": "place"},
                {"name": "microwave", "type": "place"},
                {"name": "kitchentable", "type": "place"},
            ],
            "init": [
                "(openable fridge_305)",
                f"(inside {item} fridge_305)",
                "(surface kitchentable)",
                "(handempty)",
            ],
        }
    )


def skill(cid, name, **args):
    return {"content": f"I will {name.replace('_', ' ')}.", "tool_calls": [{"id": cid, "name": name, "arguments": args}]}


DONE = text("The instruction is complete.")


def main():
    blocks_text = (ROOT / "data" / "benchmarks" / "blocksworld" / "domain.pddl").read_text()

    write(
        "color",
        {
            "description": "Full generation; the goal agent adds a color fluent and the initial-state agent asks the user for block colors.",
            "command": "plan",
            "task": blocks_task("color", "Place the blue block on top of the red block."),
            "answers": ["red", "blue"],
            "expect": {"exit": 0},
        },
        {
            "domain": [
                text(f"```pddl\n{blocks_text}```"),
                text(
                    json.dumps(
                        {
                            "edits": [
                                {
                                    "add_or_modify_fluent": {
                                        "name": "color",
                                        "kind": "boolean",
                                        "parameters": [{"name": "b", "type": "block"}, {"name": "c", "type": "object"}],
                                        "description": "block ?b has color ?c",
                                    }
                                }
                            ]
                        }
                    )
                ),
            ],
            "init": [
                text(two_blocks()),
                call("call_q1", "ask_user", question="What is the color of block b1?"),
                call("call_q2", "ask_user", question="What is the color of block b2?"),
                text(
                    two_blocks(
                        [{"name": "red", "type": "object"}, {"name": "blue", "type": "object"}],
                        ["(color b1 red)", "(color b2 blue)"],
                    )
                ),
            ],
            "goal": [
                call(
                    "call_color",
                    "missing_or_incorrect_fluent",
                    fluent_name="color",
                    fluent_description="color(?b - block, ?c) holds when block ?b has color ?c",
                ),
                goal("(and (on b2 b1) (color b2 blue) (color b1 red))"),
            ],
            "abstraction": [text(numbered(["Pick up the blue block b2.", "Stack b2 on the red block b1."]))],
        },
    )

    four = [{"name": f"b{i}", "type": "block"} for i in range(1, 5)]
    four_init = [f"(ontable b{i})" for i in range(1, 5)] + [f"(clear b{i})" for i in range(1, 5)] + ["(handempty)"]
    sizes = [f"(= (size b{i}) {i})" for i in range(1, 5)]
    write(
        "size-tower",
        {
            "description": "A given blocksworld domain gains a numeric size and a stacking constraint.",
            "command": "plan",
            "task": blocks_task(
                "size-tower",
                "Build a tower of all four blocks where each block rests on a larger one.",
                "Four blocks b1 to b4 of sizes 1 to 4 are on the table. All are clear and the hand is empty.",
            ),
            "domain_file": BLOCKS_DOMAIN,
            "expect": {"exit": 0},
        },
        {
            "init": [
                text(json.dumps({"objects": four, "init": four_init})),
                text(json.dumps({"objects": four, "init": four_init + sizes})),
            ],
            "goal": [
                call(
                    "call_size",
                    "action_modification",
                    action_name="stack",
                    change_description="A block may only be stacked on a larger block; blocks need a numeric size.",
                ),
                goal("(and (on b1 b2) (on b2 b3) (on b3 b4))"),
            ],
            "domain": [
                text(
                    json.dumps(
                        {
                            "edits": [
                                {
                                    "add_or_modify_fluent": {
                                        "name": "size",
                                        "kind": "numeric",
                                        "parameters": [{"name": "b", "type": "object"}],
                                        "description": "size of block ?b",
                                    }
                                },
                                {
                                    "modify_action": {
                                        "action": "stack",
                                        "precondition": "(and (holding ?b1) (clear ?b2) (< (size ?b1) (size ?b2)))",
                                    }
                                },
                            ]
                        }
                    )
                )
            ],
            "abstraction": [
                text(
                    numbered(
                        [
                            "Pick up b3.",
                            "Stack b3 on b4.",
                            "Pick up b2.",
                            "Stack b2 on b3.",
                            "Pick up b1.",
                            "Stack b1 on b2.",
                        ]
                    )
                )
            ],
        },
    )

    grippers_objects = [
        {"name": "robot1", "type": "robot"},
        {"name": "rooma", "type": "room"},
        {"name": "roomb", "type": "room"},
        {"name": "ball1", "type": "ball"},
        {"name": "left", "type": "gripper"},
        {"name": "right", "type": "gripper"},
    ]
    grippers_init = ["(at ball1 rooma)", "(at-robby robot1 roomb)", "(free robot1 left)", "(free robot1 right)"]
    write(
        "battery",
        {
            "description": "Grippers with a battery: moving costs 5 units and the robot must keep at least 20.",
            "command": "plan",
            "task": {
                "name": "battery",
                "domain": "A robot with two grippers moves between rooms and carries balls.",
                "init": "robot1 is in roomb with both grippers free and a battery level of 30. ball1 is in rooma.",
                "goal": "Bring ball1 to roomb. Every move drains 5 units of battery, the robot cannot move below 5, and it must finish with at least 20.",
            },
            "domain_file": GRIPPERS_DOMAIN,
            "expect": {"exit": 0},
        },
        {
            "init": [
                text(json.dumps({"objects": grippers_objects, "init": grippers_init})),
                text(
                    json.dumps(
                        {"objects": grippers_objects, "init": grippers_init + ["(= (battery_level robot1) 30)"]}
                    )
                ),
            ],
            "goal": [
                call(
                    "call_battery",
                    "action_modification",
                    action_name="move",
                    change_description="Moving needs a battery level of at least 5 and decreases it by 5; robots need a numeric battery_level.",
                ),
                goal("(and (at ball1 roomb) (>= (battery_level robot1) 20))"),
            ],
            "domain": [
                text(
                    json.dumps(
                        {
                            "edits": [
                                {
                                    "add_or_modify_fluent": {
                                        "name": "battery_level",
                                        "kind": "numeric",
                                        "parameters": [{"name": "r", "type": "robot"}],
                                        "description": "remaining battery of robot ?r",
                                    }
                                },
                                {
                                    "modify_action": {
                                        "action": "move",
                                        "precondition": "(and (at-robby ?r ?from) (>= (battery_level ?r) 5))",
                                        "effects": [
                                            "(at-robby ?r ?to)",
                                            "(not (at-robby ?r ?from))",
                                            "(decrease (battery_level ?r) 5)",
                                        ],
                                    }
                                },
                            ]
                        }
                    )
                )
            ],
            "abstraction": [
                text(
                    numbered(
                        [
                            "Move robot1 from roomb to rooma.",
                            "Pick up ball1 in rooma.",
                            "Move robot1 back to roomb.",
                            "Drop ball1 in roomb.",
                        ]
                    )
                )
            ],
        },
    )

    write(
        "unsolvable",
        {
            "description": "Contradictory goal on a given domain; the planner proves there is no plan.",
            "command": "plan",
            "task": blocks_task("unsolvable", "Put b1 on b2 and b2 on b1 at the same time."),
            "domain_file": BLOCKS_DOMAIN,
            "expect": {"exit": 2},
        },
        {
            "init": [text(two_blocks())],
            "goal": [goal("(and (on b1 b2) (on b2 b1))")],
        },
    )

    write(
        "always-malformed",
        {
            "description": "The domain agent never produces PDDL and runs out of correction turns.",
            "command": "plan",
            "task": blocks_task("always-malformed", "Put b1 on b2."),
            "expect": {"exit": 65},
        },
        {},
        {"domain": text("I think the domain has blocks.")},
    )

    write(
        "duplicate-request",
        {
            "description": "A spurious request for an existing fluent is rejected and generation continues.",
            "command": "plan",
            "task": blocks_task("duplicate-request", "Put b1 on b2."),
            "domain_file": BLOCKS_DOMAIN,
            "expect": {"exit": 0},
        },
        {
            "init": [
                call(
                    "call_dup",
                    "missing_or_incorrect_fluent",
                    fluent_name="holding",
                    fluent_description="holding(?b - block): the hand holds ?b",
                ),
                text(two_blocks()),
            ],
            "domain": [
                text(
                    json.dumps(
                        {
                            "add_or_modify_fluent": {
                                "name": "holding",
                                "kind": "boolean",
                                "parameters": [{"name": "b", "type": "block"}],
                            }
                        }
                    )
                )
            ],
            "goal": [goal("(on b1 b2)")],
            "abstraction": [text(numbered(["Pick up b1.", "Stack b1 on b2."]))],
        },
    )

    repaired = """(define (problem goal-repair)
  (:domain blocksworld)
  (:objects b1 b2 - block)
  (:init (ontable b1) (ontable b2) (clear b1) (clear b2) (handempty))
  (:goal (on b1 b2)))"""
    write(
        "goal-repair",
        {
            "description": "The goal agent keeps naming an undeclared block; the debugger repairs the problem with documentation.",
            "command": "plan",
            "task": blocks_task("goal-repair", "Put the first block on the second block."),
            "domain_file": BLOCKS_DOMAIN,
            "settings": {"correction_limit": 4},
            "expect": {"exit": 0},
        },
        {
            "init": [text(two_blocks())],
            "debugger": [text(f"The goal names b9, which is not declared; the second block is b2.\n```pddl\n{repaired}\n```")],
            "abstraction": [text(numbered(["Pick up b1.", "Stack b1 on b2."]))],
        },
        {"goal": goal("(on b1 b9)")},
    )

    write(
        "fridge-teach",
        {
            "description": "The user asks the goal agent to remember that the fridge must be closed afterwards.",
            "command": "plan",
            "task": {
                "name": "fridge-teach",
                "domain": HOUSEHOLD_TEXT,
                "init": "The milk is in the closed fridge fridge_305. The kitchen table is a surface and the robot's hand is empty.",
                "goal": f"Put the milk on the kitchen table. Save the following to memory: {FRIDGE_RULE[0].lower()}{FRIDGE_RULE[1:]}",
            },
            "domain_file": HOUSEHOLD_DOMAIN,
            "expect": {"exit": 0},
        },
        {
            "init": [text(household_init("milk"))],
            "goal": [
                call("call_mem", "store_memory", summary=FRIDGE_RULE),
                goal("(and (on milk kitchentable) (not (is_open fridge_305)))"),
            ],
            "abstraction": [
                text(
                    numbered(
                        [
                            "Open the fridge.",
                            "Take the milk from the fridge.",
                            "Close the fridge.",
                            "Put the milk on the kitchen table.",
                        ]
                    )
                )
            ],
        },
    )

    salmon_replies = {
        "init": [text(household_init("salmon"))],
        "goal": [goal("(and (is_heated salmon) (on salmon kitchentable))")],
        "abstraction": [
            text(
                numbered(
                    [
                        "Open the fridge.",
                        "Take the salmon out of the fridge.",
                        "Heat the salmon.",
                        "Put the salmon on the kitchen table.",
                    ]
                )
            )
        ],
    }
    salmon_task = {
        "name": "salmon",
        "domain": HOUSEHOLD_TEXT,
        "init": "The salmon is in the closed fridge fridge_305. There is a microwave and a kitchen table. The robot's hand is empty.",
        "goal": "Heat the salmon and put it on the kitchen table.",
    }
    write(
        "salmon",
        {
            "description": "Plan, translate and execute; the executor realizes the heating step with several skills.",
            "command": "run",
            "task": salmon_task,
            "domain_file": HOUSEHOLD_DOMAIN,
            "world": "../../worlds/kitchen.json",
            "expect": {"exit": 0},
        },
        {
            **salmon_replies,
            "executor": [
                skill("call_e1", "open", target="fridge_305"),
                DONE,
                skill("call_e2", "grab", target="salmon"),
                DONE,
                skill("call_e3", "put_in", object="salmon", container="microwave"),
                skill("call_e4", "heat", object="salmon"),
                skill("call_e5", "grab", target="salmon"),
                DONE,
                skill("call_e6", "put_on", object="salmon", surface="kitchentable"),
                DONE,
            ],
            "validator": [
                text(json.dumps({"decision": "goal-met", "feedback": "The salmon is heated and on the kitchen table."}))
            ],
        },
    )

    write(
        "validator-abort",
        {
            "description": "The executor asks twice for a skill that does not exist and the validator aborts.",
            "command": "run",
            "task": {**salmon_task, "name": "validator-abort"},
            "domain_file": HOUSEHOLD_DOMAIN,
            "world": "../../worlds/kitchen.json",
            "expect": {"exit": 3},
        },
        {
            **salmon_replies,
            "executor": [
                skill("call_e1", "open", target="fridge_305"),
                DONE,
                skill("call_e2", "grab", target="salmon"),
                DONE,
                skill("call_e3", "microwave_on", target="salmon"),
                skill("call_e4", "microwave_on", target="salmon"),
            ],
            "validator": [
                text(
                    json.dumps(
                        {
                            "decision": "abort",
                            "feedback": "The salmon was never heated: the executor has no skill to switch the microwave on. Please heat it by putting it in the microwave first.",
                        }
                    )
                )
            ],
        },
    )

    write(
        "fridge",
        {
            "description": "A stored correction makes the goal agent close the fridge; the plan is executed.",
            "command": "run",
            "task": {
                "name": "fridge",
                "domain": HOUSEHOLD_TEXT,
                "init": "The milk is in the closed fridge fridge_305. The kitchen table is a surface and the robot's hand is empty.",
                "goal": "Put the milk on the kitchen table.",
            },
            "domain_file": HOUSEHOLD_DOMAIN,
            "world": "../../worlds/kitchen.json",
            "memory": [FRIDGE_RULE],
            "expect": {"exit": 0},
        },
        {
            "init": [text(household_init("milk"))],
            "goal": [goal("(and (on milk kitchentable) (not (is_open fridge_305)))")],
            "abstraction": [
                text(
                    numbered(
                        [
                            "Open the fridge.",
                            "Take the milk from the fridge.",
                            "Close the fridge.",
                            "Put the milk on the kitchen table.",
                        ]
                    )
                )
            ],
            "executor": [
                skill("call_e1", "open", target="fridge_305"),
                DONE,
                skill("call_e2", "grab", target="milk"),
                DONE,
                skill("call_e3", "close", target="fridge_305"),
                DONE,
                skill("call_e4", "put_on", object="milk", surface="kitchentable"),
                DONE,
            ],
            "validator": [
                text(json.dumps({"decision": "goal-met", "feedback": "The milk is on the table and the fridge is closed."}))
            ],
        },
    )


if __name__ == "__main__":
    main()
