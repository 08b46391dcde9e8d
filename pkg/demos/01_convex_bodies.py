# Convex bodies as support functions on a direction grid.
#
# A compact convex set A in the plane is stored by h_A(xi) = max_{a in A} (a, xi)
# at n_xi equally spaced unit directions.  Minkowski sums add support vectors,
# and the Hausdorff distance is the largest gap between them.
import numpy as np

from svapprox import ball, convexify, direction_grid, hausdorff, hausdorff_grid_bound, minkowski_combine, set_norm

grid = direction_grid(2, 64)

# a triangle and a square, built as hulls of their corners
tri = convexify([[0, 0], [2, 0], [0, 1]], grid)
sq = convexify([[-1, -1], [1, -1], [1, 1], [-1, 1]], grid)

print("||triangle||  =", set_norm(tri))
print("||square||    =", set_norm(sq), "(half-diagonal is", np.sqrt(2), ")")

# Minkowski arithmetic: negative weights reflect the body
combo = minkowski_combine(2.0, tri, -0.5, sq)
print("2*tri - 0.5*sq is convex:", combo.validate() is combo)

# distances, and how far the grid value can be from the true one
d = hausdorff(tri, sq)
print(f"delta(tri, sq) on the grid = {d:.6f}, true value within +{hausdorff_grid_bound(tri, sq):.2e}")

# inflating by a ball moves the body exactly r away
print("delta(tri + B_0.3, tri) =", hausdorff(tri + ball(0.3, grid), tri))

# the vertices of the polygon cut out by the supporting lines
V = tri.vertices()
print("distinct vertices of the triangle:", np.unique(np.round(V, 12), axis=0).tolist())
