// Mirrors of the advisor service's JSON shapes. Every number shown in the
// UI comes straight out of these; the client never computes statistics.
export {};
