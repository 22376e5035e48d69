use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cyclic factor {coordinate} has order {order}; orders must be >= 1")]
    InvalidOrder { coordinate: usize, order: i64 },

    #[error("torus flags have length {flags}, expected {depth}")]
    FlagLengthMismatch { flags: usize, depth: usize },

    #[error("total group size overflows the exact integer range")]
    SizeOverflow,

    #[error("value array has length {got}, expected {expected}")]
    MalformedValues { got: usize, expected: usize },

    #[error("channel dimension must be >= 1")]
    ZeroChannels,

    #[error("frequency {value} at coordinate {coordinate} is outside the range {lo}..={hi}")]
    FrequencyOutOfRange { coordinate: usize, value: i64, lo: i64, hi: i64 },

    #[error("index {index:?} has {len} coordinates but the group has depth {depth}")]
    IndexTooLong { index: Vec<i64>, len: usize, depth: usize },

    #[error("channel {channel} out of range for {channels} channel(s)")]
    ChannelOutOfRange { channel: usize, channels: usize },

    #[error("level {k} is out of range 0..={depth}")]
    LevelOutOfRange { k: usize, depth: usize },

    #[error("term {k} is not measurable with respect to the first {k} coordinates (deviation {deviation:e})")]
    NotAdapted { k: usize, deviation: f64 },

    #[error("adapted sequence has {terms} terms; at most {max} are allowed")]
    TooManyTerms { terms: usize, max: usize },

    #[error("operands live on different groups or channel counts")]
    ShapeMismatch,

    #[error("coordinate {coordinate} is not a torus coordinate")]
    NotTorus { coordinate: usize },

    #[error("function is not a Hardy martingale: coefficient at {index:?} lies outside the positive cone")]
    NotHardy { index: Vec<i64> },

    #[error("degree bound {degree} exceeds the positive frequency range 1..={max}")]
    DegreeTooLarge { degree: usize, max: usize },

    #[error("multiplier value {value} at {index:?} is negative or not finite")]
    NegativeMultiplier { index: Vec<i64>, value: f64 },

    #[error("duplicate multiplier key (index {index:?}, channel {channel})")]
    DuplicateKey { index: Vec<i64>, channel: usize },

    #[error("grade {grade} exceeds depth {depth}")]
    GradeTooLarge { grade: usize, depth: usize },

    #[error("index {index:?} has support beyond grade {grade}")]
    SupportBeyondGrade { index: Vec<i64>, grade: usize },

    #[error("index {index:?} is outside the >_last cone")]
    OutsideCone { index: Vec<i64> },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown command `{0}`")]
    UnknownCommand(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
