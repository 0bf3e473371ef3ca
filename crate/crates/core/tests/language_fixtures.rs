//! Language-detection validation: 50 labeled fixtures — three per
//! Latin-script language (12 languages) and fourteen across the non-Latin
//! script buckets. Every fixture is held-out text, disjoint from the
//! detector's training seeds.

use htmlsift_core::corpus::{default_allowed_langs, detect_language};
use std::collections::BTreeSet;

const FIXTURES: &[(&str, &str)] = &[
    // --- cs ---
    ("cs", "Počasí bylo tento týden překvapivě chladné a mnoho lidí se rozhodlo zůstat doma se svými rodinami, dokud bouře nepřejde."),
    ("cs", "Otevřela starou dřevěnou krabici a našla dopisy, které její babička napsala před mnoha lety během dlouhé zimy."),
    ("cs", "Náš vlak odjíždí brzy ráno, takže bychom si měli sbalit tašky dnes večer a zkontrolovat jízdní řád, než půjdeme spát."),
    // --- de ---
    ("de", "Das Wetter war diese Woche überraschend kalt, und viele Menschen haben beschlossen, mit ihren Familien zu Hause zu bleiben, bis der Sturm vorüber ist."),
    ("de", "Sie öffnete die alte Holzkiste und fand Briefe, die ihre Großmutter vor vielen Jahren während des langen Winters geschrieben hatte."),
    ("de", "Unser Zug fährt früh am Morgen ab, deshalb sollten wir unsere Taschen heute Abend packen und den Fahrplan prüfen, bevor wir schlafen gehen."),
    // --- en ---
    ("en", "The weather this week has been surprisingly cold, and many people have decided to stay at home with their families until the storm passes."),
    ("en", "She opened the old wooden box and found letters that her grandmother had written many years ago during the long winter."),
    ("en", "Our train leaves early in the morning, so we should pack our bags tonight and check the timetable before going to bed."),
    // --- es ---
    ("es", "El tiempo esta semana ha sido sorprendentemente frío, y muchas personas han decidido quedarse en casa con sus familias hasta que pase la tormenta."),
    ("es", "Ella abrió la vieja caja de madera y encontró cartas que su abuela había escrito hace muchos años durante el largo invierno."),
    ("es", "Nuestro tren sale temprano por la mañana, así que deberíamos preparar las maletas esta noche y revisar el horario antes de acostarnos."),
    // --- fr ---
    ("fr", "Le temps cette semaine a été étonnamment froid, et beaucoup de gens ont décidé de rester chez eux avec leurs familles jusqu'à la fin de la tempête."),
    ("fr", "Elle a ouvert la vieille boîte en bois et a trouvé des lettres que sa grand-mère avait écrites il y a de nombreuses années pendant le long hiver."),
    ("fr", "Notre train part tôt le matin, donc nous devrions préparer nos bagages ce soir et vérifier les horaires avant d'aller nous coucher."),
    // --- it ---
    ("it", "Il tempo questa settimana è stato sorprendentemente freddo, e molte persone hanno deciso di restare a casa con le loro famiglie finché la tempesta non passa."),
    ("it", "Lei aprì la vecchia scatola di legno e trovò lettere che sua nonna aveva scritto molti anni fa durante il lungo inverno."),
    ("it", "Il nostro treno parte presto la mattina, quindi dovremmo preparare le valigie stasera e controllare l'orario prima di andare a dormire."),
    // --- nl ---
    ("nl", "Het weer was deze week verrassend koud, en veel mensen hebben besloten om thuis te blijven met hun gezinnen totdat de storm voorbij is."),
    ("nl", "Ze opende de oude houten doos en vond brieven die haar grootmoeder vele jaren geleden tijdens de lange winter had geschreven."),
    ("nl", "Onze trein vertrekt vroeg in de ochtend, dus we moeten vanavond onze tassen inpakken en de dienstregeling controleren voordat we gaan slapen."),
    // --- pl ---
    ("pl", "Pogoda w tym tygodniu była zaskakująco zimna i wiele osób postanowiło zostać w domu ze swoimi rodzinami, dopóki burza nie minie."),
    ("pl", "Otworzyła starą drewnianą skrzynkę i znalazła listy, które jej babcia napisała wiele lat temu podczas długiej zimy."),
    ("pl", "Nasz pociąg odjeżdża wcześnie rano, więc powinniśmy spakować torby dziś wieczorem i sprawdzić rozkład jazdy przed pójściem spać."),
    // --- pt ---
    ("pt", "O tempo esta semana tem sido surpreendentemente frio, e muitas pessoas decidiram ficar em casa com as suas famílias até que a tempestade passe."),
    ("pt", "Ela abriu a velha caixa de madeira e encontrou cartas que a sua avó tinha escrito há muitos anos durante o longo inverno."),
    ("pt", "O nosso comboio parte cedo pela manhã, por isso devemos arrumar as malas esta noite e verificar o horário antes de irmos dormir."),
    // --- ro ---
    ("ro", "Vremea a fost surprinzător de rece săptămâna aceasta și mulți oameni au decis să rămână acasă cu familiile lor până când trece furtuna."),
    ("ro", "Ea a deschis vechea cutie de lemn și a găsit scrisori pe care bunica ei le scrisese cu mulți ani în urmă în timpul iernii lungi."),
    ("ro", "Trenul nostru pleacă devreme dimineața, așa că ar trebui să ne facem bagajele în seara aceasta și să verificăm orarul înainte de culcare."),
    // --- sv ---
    ("sv", "Vädret den här veckan har varit förvånansvärt kallt, och många människor har bestämt sig för att stanna hemma med sina familjer tills stormen är över."),
    ("sv", "Hon öppnade den gamla trälådan och hittade brev som hennes mormor hade skrivit för många år sedan under den långa vintern."),
    ("sv", "Vårt tåg avgår tidigt på morgonen, så vi borde packa våra väskor i kväll och kontrollera tidtabellen innan vi går och lägger oss."),
    // --- tr ---
    ("tr", "Bu hafta hava şaşırtıcı derecede soğuktu ve birçok insan fırtına geçene kadar aileleriyle birlikte evde kalmaya karar verdi."),
    ("tr", "Eski ahşap kutuyu açtı ve büyükannesinin uzun kış boyunca yıllar önce yazdığı mektupları buldu."),
    ("tr", "Trenimiz sabah erken kalkıyor, bu yüzden bu akşam çantalarımızı hazırlamalı ve yatmadan önce tarifeyi kontrol etmeliyiz."),
    // --- non-Latin scripts (14) ---
    ("ru", "Погода на этой неделе была удивительно холодной, и многие люди решили остаться дома со своими семьями, пока не пройдёт буря."),
    ("ru", "Она открыла старую деревянную коробку и нашла письма, которые её бабушка написала много лет назад долгой зимой."),
    ("ar", "كان الطقس هذا الأسبوع باردًا بشكل مفاجئ، وقرر كثير من الناس البقاء في المنزل مع عائلاتهم حتى تمر العاصفة."),
    ("ar", "فتحت الصندوق الخشبي القديم ووجدت رسائل كتبتها جدتها قبل سنوات عديدة خلال الشتاء الطويل."),
    ("he", "מזג האוויר השבוע היה קר באופן מפתיע, ואנשים רבים החליטו להישאר בבית עם משפחותיהם עד שהסערה תחלוף."),
    ("he", "היא פתחה את הקופסה הישנה מעץ ומצאה מכתבים שסבתה כתבה לפני שנים רבות במהלך החורף הארוך."),
    ("el", "Ο καιρός αυτή την εβδομάδα ήταν εκπληκτικά κρύος, και πολλοί άνθρωποι αποφάσισαν να μείνουν σπίτι με τις οικογένειές τους μέχρι να περάσει η καταιγίδα."),
    ("th", "อากาศสัปดาห์นี้หนาวอย่างน่าประหลาดใจ และผู้คนจำนวนมากตัดสินใจอยู่บ้านกับครอบครัวจนกว่าพายุจะผ่านไป"),
    ("ja", "今週の天気は驚くほど寒くて、多くの人々は嵐が過ぎ去るまで家族と一緒に家にいることに決めました。"),
    ("ja", "彼女は古い木の箱をゆっくり開けて、祖母が長い冬の間に書いた古い手紙をたくさん見つけました。"),
    ("zh", "这个星期的天气出奇地冷,很多人决定和家人待在家里,直到暴风雨过去,孩子们在窗边看着外面的雨。"),
    ("zh", "她打开那个旧木箱,发现了祖母多年前在漫长的冬天里写下的许多信件,纸张已经发黄,字迹却依然清晰。"),
    ("ko", "이번 주 날씨는 놀라울 정도로 추웠고, 많은 사람들이 폭풍이 지나갈 때까지 가족과 함께 집에 있기로 결정했습니다."),
    ("ko", "그녀는 오래된 나무 상자를 열고 할머니가 긴 겨울 동안 여러 해 전에 쓴 편지들을 발견했습니다."),
];

#[test]
fn fixture_census_is_exactly_50() {
    assert_eq!(FIXTURES.len(), 50);
    let latin = ["cs", "de", "en", "es", "fr", "it", "nl", "pl", "pt", "ro", "sv", "tr"];
    for lang in latin {
        let n = FIXTURES.iter().filter(|(l, _)| *l == lang).count();
        assert_eq!(n, 3, "expected 3 fixtures for {lang}");
    }
    let non_latin = FIXTURES
        .iter()
        .filter(|(l, _)| !latin.contains(l))
        .count();
    assert_eq!(non_latin, 14);
}

#[test]
fn all_50_fixtures_classify_correctly() {
    let allowed: BTreeSet<String> = default_allowed_langs().into_iter().collect();
    let mut failures = Vec::new();
    for (want, text) in FIXTURES {
        let html = format!("<html><body><p>{text}</p></body></html>");
        let (got, keep) = detect_language(&html, &allowed);
        if got != *want || !keep {
            failures.push(format!("want {want}, got {got} (keep={keep}): {text}"));
        }
    }
    assert!(
        failures.is_empty(),
        "{} of 50 fixtures misclassified:\n{}",
        failures.len(),
        failures.join("\n")
    );
}

#[test]
fn short_or_scriptless_text_is_und() {
    let allowed: BTreeSet<String> = default_allowed_langs().into_iter().collect();
    // Under the 40-character floor.
    let (lang, keep) = detect_language("<p>too short</p>", &allowed);
    assert_eq!(lang, "und");
    assert!(!keep);
    // Numbers and punctuation carry no script signal.
    let digits = "12345 67890 12345 67890 12345 67890 12345 67890!!!";
    let (lang, keep) = detect_language(&format!("<p>{digits}</p>"), &allowed);
    assert_eq!(lang, "und");
    assert!(!keep);
}
