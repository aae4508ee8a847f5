# %% [markdown]
# # Writing an online strategy
#
# A strategy sees only a `View`.  The driver checks every move; here is a
# strategy that pairs the two current vertices whenever that is allowed.

# %%
from lcis import InformationLeak, OnlineViolation, run_online, sample_pair, validate_transcript


class PairCurrent:
    def start(self, n, seed):
        pass

    def select_next(self, view):
        return view.t - 1, view.t - 1

    def update(self, view):
        a, b = view.P1[-1], view.P2[-1]
        for x, y in zip(view.S1, view.S2):
            if view.adjacent(1, a, x) != view.adjacent(2, b, y):
                return None
        return a, b


y = sample_pair(128, seed=3)
sol, tr = run_online(PairCurrent(), y)
print("size", sol.size, "violation:", validate_transcript(tr, y))

# %% [markdown]
# Asking about an edge that has not been revealed raises `InformationLeak`,
# and an illegal update aborts the run with the broken rule named.

# %%
class Cheater(PairCurrent):
    def update(self, view):
        if view.t == 2:
            view.adjacent(1, 0, 100)
        return None


try:
    run_online(Cheater(), y)
except InformationLeak as exc:
    print("leak:", exc)


class OldPair(PairCurrent):
    def update(self, view):
        return (0, 1) if view.t == 5 else None


try:
    run_online(OldPair(), y)
except OnlineViolation as exc:
    print("violation:", exc.clause, "at round", exc.t)
