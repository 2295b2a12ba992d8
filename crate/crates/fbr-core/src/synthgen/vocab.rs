//! Fixed vocabularies for the corpus generator. Category word lists are
//! pairwise disjoint; the ambiguous list is shared by every category so
//! that queries can also match songs outside their own category.

/// Tag token of each category, aligned with the default category labels.
pub const CATEGORY_SLUGS: [&str; 10] = [
    "pop", "rap", "rock", "jazz", "hits", "reggae", "country", "world", "comedy", "latin",
];

pub const CATEGORY_WORDS: [[&str; 14]; 10] = [
    // Pop
    [
        "sugar", "neon", "crush", "diamond", "glitter", "bubble", "kiss", "radio", "mirror",
        "candy", "velvet", "sparkle", "disco", "heartbeat",
    ],
    // Rap
    [
        "hustle", "flow", "cipher", "crown", "grind", "chrome", "verse", "mic", "flex", "rhyme",
        "trap", "block", "bounce", "swagger",
    ],
    // Rock
    [
        "thunder", "riff", "rebel", "granite", "engine", "howl", "voltage", "leather", "storm",
        "steel", "hammer", "wolf", "fuzz", "roar",
    ],
    // Jazz
    [
        "saxophone", "swing", "lounge", "brass", "bebop", "scat", "stride", "muted", "indigo",
        "velour", "quartet", "piano", "midnight", "sway",
    ],
    // Today's Hit
    [
        "viral", "trending", "chart", "buzz", "fresh", "remix", "banger", "hook", "drop", "loop",
        "snippet", "stream", "playlist", "hype",
    ],
    // Reggae
    [
        "island", "dub", "roots", "irie", "skank", "riddim", "palm", "sunshine", "dread",
        "kingston", "vibes", "mellow", "breeze", "lion",
    ],
    // Country
    [
        "prairie", "boots", "dusty", "whiskey", "saddle", "creek", "barn", "twang", "pickup",
        "hay", "fiddle", "porch", "lonesome", "canyon",
    ],
    // International
    [
        "passport", "horizon", "nomad", "bazaar", "monsoon", "tundra", "safari", "fjord",
        "caravan", "oasis", "steppe", "lagoon", "temple", "village",
    ],
    // Comedy
    [
        "giggle", "parody", "spoof", "slapstick", "punchline", "wacky", "goofy", "prank", "snort",
        "chuckle", "silly", "banana", "clown", "jest",
    ],
    // Latin
    [
        "salsa", "fiesta", "tango", "rumba", "mango", "cumbia", "sol", "amor", "playa", "ritmo",
        "corazon", "samba", "bailar", "calle",
    ],
];

/// Shared across categories; a query ending in one of these can also match
/// songs outside the query's category.
pub const AMBIGUOUS_WORDS: [&str; 20] = [
    "love", "night", "heart", "dance", "dream", "fire", "rain", "summer", "city", "road", "light",
    "star", "time", "home", "blue", "wild", "sweet", "golden", "river", "echo",
];

pub const TITLE_NOUNS: [&str; 12] = [
    "song", "anthem", "ballad", "groove", "melody", "tune", "jam", "track", "serenade", "chorus",
    "medley", "refrain",
];

pub const ALBUM_NOUNS: [&str; 8] = [
    "collection", "sessions", "anthology", "chronicles", "tales", "visions", "diaries", "archives",
];

pub const FIRST_NAMES: [&str; 20] = [
    "Alex", "Maria", "Jon", "Luna", "Ray", "Nina", "Sam", "Tina", "Omar", "Iris", "Leo", "Zara",
    "Max", "Ivy", "Cole", "Dana", "Finn", "Gia", "Hugo", "Jade",
];

pub const LAST_NAMES: [&str; 20] = [
    "Rivers", "Stone", "Blake", "Cruz", "Monroe", "Vega", "Frost", "Lane", "Hart", "Wolfe",
    "Knight", "Bell", "Fox", "Reyes", "Quinn", "Shaw", "Banks", "Hayes", "Brooks", "Dean",
];

pub const USER_PARTS: [&str; 12] = [
    "listener", "fan", "beat", "sonic", "audio", "tune", "vinyl", "groove", "mix", "nova",
    "pulse", "wave",
];

/// Filler words for descriptions; deliberately disjoint from the topic and
/// ambiguous vocabularies so descriptions add length, not query matches.
pub const FILLER_WORDS: [&str; 24] = [
    "official", "music", "video", "version", "live", "session", "studio", "recorded", "full",
    "original", "cover", "edition", "featuring", "performance", "sound", "master", "release",
    "single", "premiere", "extended", "acoustic", "deluxe", "bonus", "presenting",
];
