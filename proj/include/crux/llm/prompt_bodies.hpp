#pragma once

// Prompt bodies for the text pipeline, kept byte-exact. Slots are {text},
// {keywords} and {clue}; everything else is literal.

namespace crux::llm::prompts {

inline constexpr const char* check_en = R"prompt(


    Objective: Your objective is to check whether each given Italian Sentence content is present in the provided Italian text or not. Print "True" if it is present in the provided Italian text and "False" if it is not present in the provided Italian text.

    Sentences: ```{clue}```

    Text: ```{text}```
    )prompt";

inline constexpr const char* check_it = R"prompt(


    Obiettivo: il tuo obiettivo è controllare se il contenuto di ogni definizione è presente o no nel testo proposto Per ciascuna definizione scrivi "True" se il contenuto è presente nel testo e "False" se il contenuto non è contenuto nel testo.


    Sentences: ```{clue}```

    Text: ```{text}```
    )prompt";

inline constexpr const char* clue_en = R"prompt(


    Generate short crossword definitions in Italian for each provided Italian keyword: {keywords} based on the following Italian text: {text}. 

    Follow these steps to achieve the objective:

    1- For each provided Italian keyword detect the part of the Italian text which contains the keyword information. 
    2- Generate short definitions in Italian: For all the Italian keywords generate short definitions in Italian based on the Italian text, and place the correspondent keyword after each generated definition. Make sure that the Italian keyword is not present in the correspondent definition.
    3- Do not use quotation marks and apostrophes in the output.

    Follow this example to complete the task: 
    "Text: La scienza è un sistema di conoscenze ottenute attraverso unattività di ricerca prevalentemente organizzata con procedimenti metodici e rigorosi, coniugando la sperimentazione con ragionamenti logici condotti a partire da un insieme di assiomi, tipici delle discipline formali. Uno dei primi esempi del loro utilizzo lo si può trovare negli Elementi di Euclide, mentre il metodo sperimentale, tipico della scienza moderna, venne introdotto da Galileo Galilei, e prevede di controllare continuamente che le osservazioni sperimentali siano coerenti con le ipotesi e i ragionamenti svolti.
    Keywords: conoscenze, ricerca, rigorosi, assiomi, ipotesi, Galileo
    Clues: 
    Conoscenze: informazioni acquisite tramite ricerca organizzata con procedimenti metodici e rigorosi.
    Ricerca: attività organizzata prevalentemente con procedimenti metodici e rigorosi finalizzata allottenimento di conoscenze.
    Rigorosi: esatti e precisi nello svolgimento delle azioni. 
    Assiomi: un insieme di verità accettate come base dei ragionamenti logici.
    Ipotesi: assunte per comprendere le osservazioni sperimentali e testare le conoscenze
    Galileo : egli introdusse il metodo sperimentale nel processo di scienza moderna.
    "

    )prompt";

inline constexpr const char* clue_it = R"prompt(
    Genera brevi definizioni di cruciverba per ciascuna delle parole chiave fornite: {keywords} sulla base del seguente testo: {text}.

    Completa l'obiettivo attraverso i seguenti passaggi:

    1- Per ciascuna delle parole chiave fornite, trova il passaggio del testo contentente l'informazione riguardante la parola chiave.
    2- Genera brevi definizioni: per tutte le parole chiave genera brevi definizioni riguardanti il testo. Nella definizione non deve essere presente la parola chiave.
    3- Non usare virgolette e apostrofi nell'output.

    Segui questo esempio per completare l'obiettivo: 
    "Testo: La scienza è un sistema di conoscenze ottenute attraverso unattività di ricerca prevalentemente organizzata con procedimenti metodici e rigorosi, coniugando la sperimentazione con ragionamenti logici condotti a partire da un insieme di assiomi, tipici delle discipline formali. Uno dei primi esempi del loro utilizzo lo si può trovare negli Elementi di Euclide, mentre il metodo sperimentale, tipico della scienza moderna, venne introdotto da Galileo Galilei, e prevede di controllare continuamente che le osservazioni sperimentali siano coerenti con le ipotesi e i ragionamenti svolti.
    Parole chiave: conoscenze, ricerca, rigorosi, assiomi, ipotesi, Galileo
    Definizioni: 
    Conoscenze: informazioni acquisite tramite ricerca organizzata con procedimenti metodici e rigorosi.
    Ricerca: attività organizzata prevalentemente con procedimenti metodici e rigorosi finalizzata allottenimento di conoscenze.
    Rigorosi: esatti e precisi nello svolgimento delle azioni. 
    Assiomi: un insieme di verità accettate come base dei ragionamenti logici.
    Ipotesi: assunte per comprendere le osservazioni sperimentali e testare le conoscenze
    Galileo : egli introdusse il metodo sperimentale nel processo di scienza moderna.
    "
    
    
    )prompt";

inline constexpr const char* kw_en = R"prompt(


    Objective: Your task is to extract described keywords in Italian from a given Italian text. These keywords will be used to create Italian crossword short definitions based on the extracted text. The clues will help Italian solvers to find the corresponding answers and complete the puzzle grid.

    Please follow these steps to achieve the objective:

    1- Extract the most important Italian keywords in the Italian text.

    2- Check keywords: check if the Italian keywords are well Explained in the given Italian text or not.

    3- Final keywords : Remove all the Italian keywords which are not well defined in the Italian text based on the last step.


    Use the following output format:

    Keywords: <Final keywords>


    Text: ```{text}```
    )prompt";

inline constexpr const char* kw_it = R"prompt(
    Obiettivo: Il tuo compito è estrarre delle parole chiave, descritte nel testo proposto. Le parole chiave estratte saranno utilizzate per creare brevi definizioni di cruciverba riguardanti il testo da cui sono estratte le parole chiave. Le definizioni saranno d'aiuto per trovare la soluzione corrispondente e completare il cruciverba.

    Completa l'obiettivo attraverso i seguenti passaggi:

    1- Estrai le parole chiave più importanti del testo.

    2- Controlla le parole chiave: controlla se le parole chiave sono descritte e definite nel testo o non sono descritte e definite nel testo.

    3- Parole chiave finali : sulla base del passaggio precedente, rimuovi tutte le parole chiave che non sono definite nel testo.



    Utilizza il seguente formato di output:

    Parole chiave: <Parole chiave finali>


    Text: ```{text}```
    )prompt";

// The five acceptability criteria used by the guideline judge.
inline constexpr const char* judge_guideline = R"prompt(1. Relevance and Cohesion: A top-notch crossword clue-answer pair thrives on a profound and meaningful connection between the clue and the answer. The clue should provide ample context or clever hints that smoothly lead solvers to the intended solution. Simultaneously, the answer must be directly tied to the clue, fitting flawlessly within the puzzle's theme or topic.
2. Wordplay and Inventiveness: Elevate your crossword clues with ingenuity and wordplay that challenge and delight solvers. Seek clues that encourage lateral thinking, incorporate witty twists, or conceal intriguing meanings. A well-crafted clue-answer pair captures the solver's imagination, transforming the puzzle into an exhilarating journey of discovery.
3. Clarity and Precision: Precision is key in creating crossword clues. Ensure your clues are crystal clear and unambiguous, presenting solvers with a distinct and precise solution. Avoid any ambiguity that might lead to multiple interpretations or numerous possible answers. The goal is to deliver a single correct solution that aligns perfectly with the clue's intended meaning.
4. Grammar and Language: Pay meticulous attention to grammar, syntax, and linguistic conventions in both the clue and the answer. Maintain grammatical correctness, coherence, and an appropriate level of complexity for a crossword puzzle.
5. General Knowledge and Fairness: Strike a balance between challenge and accessibility by grounding your clues in general knowledge or commonly known facts. Avoid overly obscure or specialized references that could alienate solvers. A great clue-answer pair caters to a diverse range of puzzle enthusiasts, offering a fair and engaging experience for all.)prompt";

}  // namespace crux::llm::prompts
