// Wire types shared with the analysis service (stroke-log JSON schema).

export type ActionType = "drawLine" | "erase" | "bucketFill";
export type PointerType = "mouse" | "pen" | "touch";

export interface PointSample {
  x: number;
  y: number;
  pointerType: PointerType;
  timestamp: number; // epoch ms
}

export interface DrawAction {
  order: number;
  action_type: ActionType;
  color: string; // #RRGGBB
  opacity: number;
  line_width: number;
  timestamp_start: number;
  timestamp_end: number;
  points: PointSample[];
}

export interface QuestionnaireAnswer {
  question: string;
  answer: string;
}

export interface Questionnaire {
  age: number | null;
  gender: string | null;
  answers: QuestionnaireAnswer[];
}

// Fixed question list; answer keys must come from here.
export const QUESTIONS: readonly string[] = [
  "Who do you imagine lives in this house?",
  "What feelings does this house give you?",
  "How old do you think the tree is?",
  "Is the tree alive or dead?",
  "Which season of the year do you think it is?",
  "Does this image remind you of anyone?",
  "How old do you think this person is?",
  "What do you think this person does?",
  "What might this person be thinking?",
  "What do you think this person feels?",
];

export function serializeLog(actions: DrawAction[]): string {
  return JSON.stringify(actions);
}
