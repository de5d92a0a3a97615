#!/usr/bin/env python3
"""Writes fig2_like.world: four rooms, six zones. The living room holds a
living area, an office alcove and a storage alcove behind partitions."""

W, H = 80, 60
grid = [["#"] * W for _ in range(H)]


def fill(c0, c1, r0, r1, ch):
    for r in range(r0, r1 + 1):
        for c in range(c0, c1 + 1):
            grid[r][c] = ch


fill(1, 49, 1, 31, "l")   # living room, living area
fill(1, 17, 1, 12, "o")   # office alcove
fill(31, 49, 1, 11, "s")  # storage alcove
fill(1, 29, 33, 58, "k")  # kitchen
fill(31, 49, 33, 58, "t") # bathroom
fill(51, 78, 1, 58, "b")  # bedroom

# Office partition with a 4-cell opening.
fill(1, 18, 13, 13, "#")
fill(18, 18, 1, 13, "#")
fill(7, 10, 13, 13, "o")
# Storage partition with a 3-cell opening.
fill(30, 49, 12, 12, "#")
fill(30, 30, 1, 12, "#")
fill(46, 48, 12, 12, "s")
# Doors from the living room.
fill(12, 19, 32, 32, "l")
fill(38, 43, 32, 32, "l")
fill(50, 50, 20, 24, "b")

objects = [
    ("desk", 4, 3), ("monitor", 5, 3), ("keyboard", 13, 8), ("monitor", 14, 9),
    ("box", 33, 3), ("shelf", 41, 2), ("box", 44, 3),
    ("sofa", 24, 22), ("tv", 33, 27), ("sofa", 6, 21),
    ("fridge", 3, 36), ("microwave", 20, 52), ("stove", 10, 56),
    ("toilet", 34, 47), ("sink", 46, 55),
    ("bed", 62, 8), ("wardrobe", 72, 44), ("bed", 60, 50),
]

legend = {
    "l": ("living_room", "living_area", "living_room"),
    "o": ("living_room", "office_nook", "office"),
    "s": ("living_room", "storage_corner", "storage"),
    "k": ("kitchen", "kitchen_area", "kitchen"),
    "t": ("bathroom", "bathroom_area", "bathroom"),
    "b": ("bedroom", "bedroom_area", "bedroom"),
}

with open("fig2_like.world", "w") as f:
    f.write("// Analogue of a home with sub-room functional zones; not a replica.\n")
    f.write("resolution=0.1\n")
    f.write("categories=kitchen,office,living_room,bedroom,bathroom,corridor,storage\n")
    f.write("grid\n")
    for row in grid:
        f.write("".join(row) + "\n")
    f.write("end\nlegend\n")
    for letter in "losktb":
        room, zone, cat = legend[letter]
        f.write(f"{letter} room={room} zone={zone} category={cat}\n")
    f.write("end\nobjects\n")
    for name, c, r in objects:
        assert grid[r][c] != "#", (name, c, r)
        f.write(f"object {name} {c} {r}\n")
    f.write("end\n")
