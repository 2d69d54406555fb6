#!/usr/bin/env python3
"""Writes the deterministic 50-image scene corpus used by the test suite.

Usage: make_fixture_corpus.py OUT_PATH [--images N] [--seed S]
"""

import argparse
import random

OBJECTS = [
    "man", "woman", "boy", "girl", "dog", "cat", "car", "bus", "tree", "horse",
    "bench", "table", "chair", "plate", "cup", "umbrella", "kite", "bike",
    "traffic light", "street", "building", "sign", "giraffe", "fence", "window",
]
PLURAL = {"man": "men", "woman": "women", "bus": "buses", "bench": "benches",
          "traffic light": "traffic lights", "tree": "trees", "car": "cars"}
ATTRIBUTES = ["red", "white", "tall", "small", "wooden", "black", "old", "green", "yellow", "parked", "running"]
PREDICATES = ["on", "near", "behind", "next to", "riding", "holding", "wearing", "has", "in front of",
              "sitting on", "hit by", "parked on", "is under"]
REGION_TEMPLATES = [
    "a {adj} {name}",
    "{name} {prep} the {other}",
    "a {adj} {name} {prep} a {other}",
    "the {name} {ving} the {other}",
    "{name} {ving} on the {other}",
    "{name} {ven} by a {other}",
    "a {ving_adj} {name}",
    "the {other} and the {name}",
]
ADJ = ["red", "yellow", "tall", "small", "old", "white", "wooden", "shiny"]
PREP = ["on", "near", "behind", "next to", "under", "with"]
VING = ["riding", "holding", "watching", "standing", "sitting"]
VEN = ["hit", "pulled", "held", "covered"]
VING_ADJ = ["running", "sleeping", "smiling", "flying"]


def box(rng, width, height):
    w = rng.randint(10, width // 2)
    h = rng.randint(10, height // 2)
    return rng.randint(0, width - w), rng.randint(0, height - h), w, h


def inside(rng, b):
    x, y, w, h = b
    dx, dy = rng.randint(0, w // 4), rng.randint(0, h // 4)
    return x + dx, y + dy, max(1, w - dx - rng.randint(0, w // 4)), max(1, h - dy - rng.randint(0, h // 4))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out")
    ap.add_argument("--images", type=int, default=50)
    ap.add_argument("--seed", type=int, default=20240611)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    lines = ["# Generated by tools/make_fixture_corpus.py; do not edit by hand."]
    next_object = 1
    for i in range(args.images):
        image_id = f"img{i + 1:03d}"
        width, height = rng.choice([(640, 480), (800, 600), (500, 375)])
        lines.append(f"I\t{image_id}\t{width}\t{height}")
        names = rng.sample(OBJECTS, rng.randint(2, 7))
        objects = []
        for name in names:
            oid = f"o{next_object}"
            next_object += 1
            surface = PLURAL.get(name, name) if rng.random() < 0.15 else name
            if rng.random() < 0.1:
                surface = surface.title()
            b = box(rng, width, height)
            objects.append((oid, name, b))
            lines.append(f"O\t{oid}\t{image_id}\t{surface}\t{b[0]}\t{b[1]}\t{b[2]}\t{b[3]}")
        for oid, name, b in objects:
            for _ in range(rng.randint(0, 2)):
                    lines.append(f"T\t{image_id}\t{oid}\tA\tis\t{rng.choice(ATTRIBUTES)}")
        for _ in range(rng.randint(0, len(objects))):
            (s_id, _, _), (o_id, _, _) = rng.sample(objects, 2)
            lines.append(f"T\t{image_id}\t{s_id}\tR\t{rng.choice(PREDICATES)}\t{o_id}")
        for _ in range(rng.randint(1, 4)):
            oid, name, b = rng.choice(objects)
            other = rng.choice([n for _, n, _ in objects if n != name] or ["ground"])
            phrase = rng.choice(REGION_TEMPLATES).format(
                adj=rng.choice(ADJ), name=name, other=other, prep=rng.choice(PREP),
                ving=rng.choice(VING), ven=rng.choice(VEN), ving_adj=rng.choice(VING_ADJ))
            r = inside(rng, b) if rng.random() < 0.8 else box(rng, width, height)
            lines.append(f"R\t{image_id}\t{phrase}\t{r[0]}\t{r[1]}\t{r[2]}\t{r[3]}")
    with open(args.out, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
