"""Bundled word lists used by the preprocessing pipelines."""

# Standard English stopword list (179 entries, lowercase).
STOPWORDS = frozenset("""
i me my myself we our ours ourselves you you're you've you'll you'd your yours
yourself yourselves he him his himself she she's her hers herself it it's its
itself they them their theirs themselves what which who whom this that that'll
these those am is are was were be been being have has had having do does did
doing a an the and but if or because as until while of at by for with about
against between into through during before after above below to from up down
in out on off over under again further then once here there when where why how
all any both each few more most other some such no nor not only own same so
than too very s t can will just don don't should should've now d ll m o re ve
y ain aren aren't couldn couldn't didn didn't doesn doesn't hadn hadn't hasn
hasn't haven haven't isn isn't ma mightn mightn't mustn mustn't needn needn't
shan shan't shouldn shouldn't wasn wasn't weren weren't won won't wouldn wouldn't
""".split())

# Apostrophe-free variants so stopwords still match after punctuation removal.
STOPWORDS = STOPWORDS | frozenset(w.replace("'", "") for w in STOPWORDS)

NEGATORS = frozenset({"not", "no", "never"})

# Whole-word contractions checked before the suffix rules below.
CONTRACTIONS = {
    "don't": ("do", "not"),
    "can't": ("can", "not"),
    "won't": ("will", "not"),
}

# Suffix contractions, longest first.
CONTRACTION_SUFFIXES = (
    ("n't", ("not",)),
    ("'m", ("am",)),
    ("'re", ("are",)),
    ("'ve", ("have",)),
    ("'ll", ("will",)),
    ("'d", ("would",)),
)

# Irregular inflections mapped to their base form. Forms of be/do/have are
# deliberately absent: the suffix stripper turns them into "wa", "doe", "ha".
IRREGULAR = {
    # plurals
    "men": "man", "women": "woman", "children": "child", "people": "person",
    "feet": "foot", "teeth": "tooth", "geese": "goose", "mice": "mouse",
    "lice": "louse", "oxen": "ox", "wives": "wife", "knives": "knife",
    "lives": "life", "leaves": "leaf", "wolves": "wolf", "halves": "half",
    "selves": "self", "shelves": "shelf", "thieves": "thief", "loaves": "loaf",
    "calves": "calf", "data": "datum", "criteria": "criterion", "cacti": "cactus",
    "fungi": "fungus", "nuclei": "nucleus", "analyses": "analysis", "crises": "crisis",
    "theses": "thesis", "phenomena": "phenomenon", "dice": "die", "pence": "penny",
    # verbs: past tense and participles
    "arose": "arise", "arisen": "arise", "awoke": "awake", "awoken": "awake",
    "bore": "bear", "borne": "bear", "beat": "beat", "beaten": "beat",
    "became": "become", "began": "begin", "begun": "begin", "bent": "bend",
    "bet": "bet", "bid": "bid", "bit": "bite", "bitten": "bite", "bled": "bleed",
    "blew": "blow", "blown": "blow", "broke": "break", "broken": "break",
    "bred": "breed", "brought": "bring", "built": "build", "burnt": "burn",
    "burst": "burst", "bought": "buy", "caught": "catch", "chose": "choose",
    "chosen": "choose", "clung": "cling", "came": "come", "cost": "cost",
    "crept": "creep", "dealt": "deal", "dug": "dig", "dove": "dive",
    "drew": "draw", "drawn": "draw", "dreamt": "dream", "drank": "drink",
    "drunk": "drink", "drove": "drive", "driven": "drive", "ate": "eat",
    "eaten": "eat", "fell": "fall", "fallen": "fall", "fed": "feed",
    "felt": "feel", "fought": "fight", "found": "find", "fled": "flee",
    "flung": "fling", "flew": "fly", "flown": "fly", "forbade": "forbid",
    "forbidden": "forbid", "forgot": "forget", "forgotten": "forget",
    "forgave": "forgive", "forgiven": "forgive", "froze": "freeze",
    "frozen": "freeze", "got": "get", "gotten": "get", "gave": "give",
    "given": "give", "went": "go", "gone": "go", "ground": "grind",
    "grew": "grow", "grown": "grow", "hung": "hang", "heard": "hear",
    "hid": "hide", "hidden": "hide", "hit": "hit", "held": "hold",
    "hurt": "hurt", "kept": "keep", "knelt": "kneel", "knew": "know",
    "known": "know", "laid": "lay", "led": "lead", "leapt": "leap",
    "learnt": "learn", "left": "leave", "lent": "lend", "let": "let",
    "lay": "lie", "lain": "lie", "lit": "light", "lost": "lose", "made": "make",
    "meant": "mean", "met": "meet", "paid": "pay", "proven": "prove",
    "quit": "quit", "ran": "run", "rang": "ring", "rung": "ring", "rose": "rise",
    "risen": "rise", "rode": "ride", "ridden": "ride", "said": "say",
    "saw": "see", "seen": "see", "sought": "seek", "sold": "sell", "sent": "send",
    "set": "set", "shook": "shake", "shaken": "shake", "shone": "shine",
    "shot": "shoot", "showed": "show", "shown": "show", "shrank": "shrink",
    "shrunk": "shrink", "shut": "shut", "sang": "sing", "sung": "sing",
    "sank": "sink", "sunk": "sink", "sat": "sit", "slept": "sleep", "slid": "slide",
    "slung": "sling", "spoke": "speak", "spoken": "speak", "sped": "speed",
    "spent": "spend", "spun": "spin", "spat": "spit", "split": "split",
    "spread": "spread", "sprang": "spring", "sprung": "spring", "stood": "stand",
    "stole": "steal", "stolen": "steal", "stuck": "stick", "stung": "sting",
    "stank": "stink", "strode": "stride", "struck": "strike", "strove": "strive",
    "swore": "swear", "sworn": "swear", "swept": "sweep", "swam": "swim",
    "swum": "swim", "swung": "swing", "took": "take", "taken": "take",
    "taught": "teach", "tore": "tear", "torn": "tear", "told": "tell",
    "thought": "think", "threw": "throw", "thrown": "throw", "trod": "tread",
    "understood": "understand", "woke": "wake", "woken": "wake", "wore": "wear",
    "worn": "wear", "wove": "weave", "woven": "weave", "wept": "weep",
    "won": "win", "wound": "wind", "wrote": "write", "written": "write",
    "withdrew": "withdraw", "withdrawn": "withdraw", "overcame": "overcome",
    "undertook": "undertake", "undertaken": "undertake", "upheld": "uphold",
    "mistook": "mistake", "mistaken": "mistake", "misunderstood": "misunderstand",
    "foresaw": "foresee", "foreseen": "foresee", "outgrew": "outgrow",
    "rebuilt": "rebuild", "retold": "retell", "rewrote": "rewrite",
    "rewritten": "rewrite", "mislaid": "mislay", "overslept": "oversleep",
    "overtook": "overtake", "overtaken": "overtake", "sewn": "sew",
    "mown": "mow", "sawn": "saw", "hewn": "hew", "strewn": "strew",
    "swollen": "swell", "smelt": "smell", "spelt": "spell", "spilt": "spill",
    "spoilt": "spoil", "dwelt": "dwell", "knit": "knit", "wed": "wed",
    # comparatives
    "better": "good", "best": "good", "worse": "bad", "worst": "bad",
}
