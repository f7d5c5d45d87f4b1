"""Regenerates mini.txt: 1000 regex patterns grouped under `# EXPECT
<class>` markers naming the verdict the analyzer must produce for each.
The acceptance suite fails on any disagreement, so label changes belong
here, with the reasoning in the commit."""

import itertools, string
from pathlib import Path

lower = string.ascii_lowercase
out = []

def group(label, patterns):
    out.append(f"# EXPECT {label}")
    out.extend(patterns)

# --- vulnerable: ambiguity by construction, end-anchored so a failure
# --- suffix exists (empty or any byte outside the reachable alphabet)
v = []
v += [f"^({c}|{c})*$" for c in lower]                                   # 26
pairs = [a+b for a, b in zip(lower, lower[1:])] + \
        [a+b for a, b in zip(lower, lower[2:])]                         # 25+24
v += [f"^({p}|{p})*$" for p in pairs[:50]]                              # 50
v += [f"^({c}+)+$" for c in lower]                                      # 26
v += [f"^({c}*)*$" for c in lower]                                      # 26
v += [f"^(({a}|{a}){b})*$" for a, b in zip(lower[:12], lower[12:24])]   # 12
v += [f"^([{a}-{m}]|[{g}-{z}])*$"
      for a, m, g, z in [("a","m","g","z"), ("b","n","h","y"), ("c","o","i","x"),
                          ("d","p","j","w"), ("e","q","k","v"), ("f","r","l","u"),
                          ("a","h","e","m"), ("n","u","r","z"), ("a","z","m","p"),
                          ("b","k","f","q"), ("c","t","p","w"), ("a","f","d","k")]]  # 12
v += [f"^({c}|{c}{c})*$" for c in lower]                                # 26
v += ["^(([01][0-9]|[012][0-3]):([0-5][0-9]))*$",
      r"^([a-zA-z]:((\\([-*\.*\w+\s+\d+]+)|(\w+)\\)+)(\w+.zip)|(\w+.ZIP))$"]  # 2
v += [f"^(([01][0-9]|[012][0-3]){s}([0-5][0-9]))*$" for s in ";,./-_=+"]     # 8
v += [r"^(\d|\d)*$", r"^(\w|\w)*$", r"^(\s|\s)*$",
      "^([0-5]|[3-8])*$", "^([a-f0-9]|[0-9a-c])*$", "^([2-9]|[0-4])*$",
      "^([e-p]|[a-j])*$", "^([D-Q]|[A-H])*$", "^([r-z]|[p-u])*$",
      "^([0-9a-f]|[8-9a-f])*$"]                                          # 10
v += [f"^((({c})*)*)*$" for c in lower[:8]]                              # 8
v += [f"^({c}|{c})*?$" for c in lower[:10]]                              # 10
group("vulnerable", v)

# --- pumpable-only: same ambiguity, no anchor, so a prefix of every
# --- pumped input matches and no failure suffix exists
p = []
p += [f"({c}|{c})*" for c in lower]                                      # 26
p += [f"({c}|{c}{c})*" for c in lower[:13]]                              # 13
p += [f"({c}*)*" for c in lower[:12]] + ["((a?)*)*"]                     # 13
group("pumpable-only", p)

# --- safe: no star, or every pump word has a single parse
s = []
words = []
for i, (a, b) in enumerate(itertools.product(lower, lower)):
    if len(words) >= 200:
        break
    words.append(a + b + lower[(i * 7) % 26] + str(i % 10))
s += words                                                               # 200
s += [f"^{c}*$" for c in lower] + [f"{c}*" for c in lower]               # 52
s += [f"^({a}{b})*$" for a, b in pairs[:40]] + \
     [f"({a}{b})*" for a, b in pairs[40:49] + pairs[:31]]                # 80
dpairs = [(a, b) for a, b in itertools.product(lower, lower) if a != b]
s += [f"^({a}|{b})*$" for a, b in dpairs[:40]] + \
     [f"({a}|{b})*" for a, b in dpairs[40:80]]                           # 80
s += ["^[a-z]*$", "^[0-9]*$", "^[a-f]*$", "^[A-Z]*$", "^[a-zA-Z]*$",
      r"^\w*$", r"^\d*$", r"^\s*$", "^[^a]*$", "^[0-9a-f]*$",
      "[a-m]*", "[n-z]*", "[02468]*", "[13579]*", "[aeiou]*",
      r"\w+", r"\d+", "^a.*b$", "^.*$", ".*",
      "^[-a-z0-9]*$", "^[a-z_]*$", "^[^0-9]*$", "^[()]*$", "^[.,;]*$"]   # 25
s += [f"^{c}{{2,5}}{d}$" for c, d in zip(lower, lower[1:] + "a")][:20]   # 20
s += [f"^{c}{{3,}}$" for c in lower[:20]]                                # 20
s += [f"{c}{{1,4}}" for c in lower[:20]]                                 # 20
s += [f"^{w}$" for w in words[100:160]]                                  # 60
s += [r"^\d+\.\d+$", r"^\d+,\d+$", r"^[a-z]+@[a-z]+\.[a-z]+$",
      r"^\d{4}-\d{2}-\d{2}$", r"^\d{2}:\d{2}$", r"^[A-Z][a-z]*$",
      r"^0x[0-9a-f]+$", r"^#[0-9a-f]{6}$", r"^[a-z]+://[a-z.]+$",
      r"^[+-]?\d+$", r"v\d+\.\d+\.\d+", r"^[a-z]+(\.[a-z]+)*$",
      r"^\w+(-\w+)*$", r"[a-z]+s?", r"^.{1,10}$",
      r"^(foo|bar)*$", r"^(cat|dog|cow)*$", r"^(get|put)*$",
      r"^(yes|no)*$", r"^(one|two|six)*$",
      r"^(ab|cd|ef)*$", r"^(abc|def)*$", r"^(x[yz])*$",
      r"^([ab]c)*$", r"^([xy]z)*$", r"(ab|cd)*", r"(foo|bar)baz",
      r"^(\d[a-z])*$", r"^(-\w)*$", r"^(\.\d)*$"]                        # 30
s += [f"({c}?)*" for c in lower] + ["()*", "(|a)*", "(a|)*", "(()*)*",
      "((a)?)*", "(a?b?)*", "^(a?)*$", "^(|x)*$", "(\\d?)*", "([ab]?)*"] # 36
group("safe", s)

# --- unsupported: constructs outside the analyzable subset
u = ["a(?=b)c*", "(?=a)b*", "x(?=y)", "(?!a)b*", "a(?!b)*c", "x(?!y)",
     "(?<=a)b*", "x(?<=y)z", "(?<!a)b*", "x(?<!y)z", "a(?=b)(?=c)", "((?=a)b)*",
     r"\ba*", r"a\b", r"\Bx*", r"x\B",
     r"(a)\1", r"(a|b)\1*", r"(aa)\2", r"(a)(b)\2", r"(x)\1\1", r"((a))\1",
     "a*+", "a*+b", "x++", "a?+b", "(ab)*+", "a{2,3}+"]                  # 28
group("unsupported", u)

# --- malformed: not valid pattern syntax
m = ["(a", "a)", "((a)", "(a))", "(", ")",
     "[z-a]", "[9-0]", "[f-a]*", "[]a",
     "a{2,1}", "a{1001}", "a{5,2}", "x{1000000}", "(a|b))", "a{3,1}b",
     "*a", "+a", "?a", "|*",
     "[abc", "[a-", "[^", "[",
     "a\\", "ab\\"]                                                       # 26
group("malformed", m)

total = sum(1 for line in out if not line.startswith("#"))
need = 1000 - total
assert need >= 0, f"overfull by {-need}"
extras = []
for i in range(need):
    a = lower[i % 26]; b = lower[(i // 26 + i) % 26]; n = i % 100
    extras.append(f"^{a}{b}{n:02d}[{a}-z]*$")
if extras:
    out.append("# EXPECT safe")
    out.extend(extras)

with open(Path(__file__).resolve().parent / "mini.txt", "w") as f:
    f.write("# 1000 regex patterns with expected classifications.\n")
    f.write("# `# EXPECT <class>` applies to every following pattern until the next marker.\n")
    f.write("\n".join(out) + "\n")

count = sum(1 for line in out if not line.startswith("#"))
print("patterns:", count, "extras:", need)
